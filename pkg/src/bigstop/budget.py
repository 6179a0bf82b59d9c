"""A mutable step budget shared by one evaluation run.

Every engine charges one unit per contraction (beta, case selection,
effect emission, let binding in MNF, each non-congruence rule in the
while language).  Congruence descent is free.  The check happens before
the contraction, so a value sitting at budget zero is still an answer.
"""


class Budget:
    __slots__ = ("remaining",)

    def __init__(self, units: int):
        if units < 0:
            raise ValueError("budget must be non-negative")
        self.remaining = units

    def spend(self) -> None:
        if self.remaining <= 0:
            raise RuntimeError("spend() on an empty budget; check remaining first")
        self.remaining -= 1

    def __repr__(self):
        return f"Budget({self.remaining})"
