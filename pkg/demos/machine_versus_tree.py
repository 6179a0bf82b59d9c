"""
One program, two engines
========================

The stack machine makes control explicit: a stack of pending frames and a
focus, stepping one frame push/pop at a time.  The tree engine recomputes
positions on every step.  They must tell the same story — same value, same
labels in the same order.
"""

from bigstop import (
    bigstop_eval,
    compile,
    k_run,
    k_step,
    parse_expr,
    print_expr,
    show_state,
)
from bigstop.traces import format_trace

program = parse_expr("case eff[probe] s(z) { z => z | s(n) => eff[hit] s(n) }")
print("program:", print_expr(program))
print()

# the machine's full transcript
state = compile(program)
print(show_state(state))
while (step := k_step(state)) is not None:
    state, emitted = step
    note = f"   emits {format_trace(emitted)}" if emitted else ""
    print(show_state(state) + note)

# same endpoint through the tree engine
machine = k_run(compile(program), 4096)
tree = bigstop_eval(program, 64)
assert machine.state.expr == tree.stopped
assert machine.trace == tree.trace
print()
print(
    f"both engines: {print_expr(tree.stopped)} | {format_trace(tree.trace)}"
    f"  (machine took {machine.steps} transitions)"
)
