"""Effect traces.

A trace is the finite word of effect labels a run has emitted so far,
represented as a tuple of strings.  The empty trace is the monoid identity
and prints as "1".  The annihilator variant pairs a prefix with a flag that,
once set, absorbs everything appended afterwards; it prints with a trailing
"0".  The label "0" itself is reserved and can never be emitted.
"""

from dataclasses import dataclass

Trace = tuple[str, ...]

EMPTY: Trace = ()

ANNIHILATOR = "0"  # reserved; never a legal label


class BadLabel(Exception):
    pass


def check_label(label: str) -> str:
    if label == ANNIHILATOR or label == "" or "·" in label:
        raise BadLabel(f"illegal effect label {label!r}")
    return label


def concat(a: Trace, b: Trace) -> Trace:
    return a + b


def format_trace(t: Trace) -> str:
    if not t:
        return "1"
    return "·".join(t)


def parse_trace(text: str) -> Trace:
    text = text.strip()
    if text == "1":
        return ()
    return tuple(check_label(p) for p in text.split("·"))


@dataclass(frozen=True)
class AnnTrace:
    """A trace that may have been cut off ("annihilated").

    Appending to an annihilated trace is a no-op: a·0·b = a·0.
    """

    prefix: Trace = ()
    annihilated: bool = False

    def __str__(self) -> str:
        if self.annihilated:
            if not self.prefix:
                return "0"
            return "·".join(self.prefix) + "·0"
        return format_trace(self.prefix)


ANN_EMPTY = AnnTrace((), False)
ANN_ZERO = AnnTrace((), True)


def ann_of(t: Trace) -> AnnTrace:
    return AnnTrace(t, False)


def ann_concat(a: AnnTrace, b: AnnTrace) -> AnnTrace:
    if a.annihilated:
        return a
    return AnnTrace(a.prefix + b.prefix, b.annihilated)


def ann_concat_all(*parts: AnnTrace) -> AnnTrace:
    out = ANN_EMPTY
    for p in parts:
        out = ann_concat(out, p)
    return out
