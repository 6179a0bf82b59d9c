"""
Budgeted runs of an imperative loop
===================================

The same budget idea works for statements over a variable store.  The
freeze variant additionally marks whether the store is mid-run (frozen) or
final, so a cut-off run can't be mistaken for a finished one.
"""

from bigstop import (
    config,
    imp_bigstop,
    imp_bigstop_freeze,
    parse_init,
    parse_stmt,
    print_config,
    print_state,
)

countdown = config(parse_stmt("while x do { x := x - 1 }"), parse_init("x=2"))
print("start:", print_config(countdown))
print()

for budget in range(9):
    c = imp_bigstop(countdown, budget)
    f = imp_bigstop_freeze(countdown, budget)
    tag = "frozen" if f.frozen else "finished"
    print(f"  budget {budget}:  {print_config(c):48s}  {print_state(f.state)} {tag}")

# a run is frozen exactly when it was cut before reaching skip
f = imp_bigstop_freeze(countdown, 100)
assert not f.frozen and print_state(f.state) == "{x=0}"
print()
print("with enough budget the loop drains x to zero and the store thaws")
