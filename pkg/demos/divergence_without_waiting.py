"""
Watching programs that never finish
===================================

Budgets turn divergence from a hang into data.  A spinning program has a
perfectly good answer at every budget; its emitted labels tell you what it
did before the cut.  The annihilator marker makes the cut itself visible
inside the trace.
"""

from bigstop import annihilator_eval, bigstop_eval, corpus_term, parse_expr, print_expr
from bigstop.traces import format_trace

# a loop that allocates forever
looping = parse_expr("(fun f(x) => eff[alloc] f x) z")
print("looping:", print_expr(looping))
for budget in (0, 2, 4, 8, 16):
    r = bigstop_eval(looping, budget)
    print(f"  budget {budget:2d}: emitted {format_trace(r.trace)}")

# a subtler one: it reduces to itself in two contractions, emitting nothing
fixed = corpus_term("leroy-grall")
print()
print("self-reproducing:", print_expr(fixed))
for budget in (0, 1, 5, 50):
    r = bigstop_eval(fixed, budget)
    assert r.stopped == fixed
print("  ...is exactly itself at every budget, with an empty trace")

# the annihilator variant appends 0 when a run was cut off, so downstream
# consumers can tell "finished with trace a" from "cut off after a"
print()
done = parse_expr("eff[a] z")
cut = parse_expr("eff[a] ((fun f(x) => f x) z)")
for name, e in (("finished", done), ("cut off", cut)):
    _, tr = annihilator_eval(e, 3)
    print(f"  {name}: {tr}")
