"""Reachability in machines whose updates never decrease any counter.

When every matrix entry and offset is nonnegative, counters only grow, so
values beyond the target can be collapsed to a single symbol ω.  That turns
an infinite state space into a finite one without changing any answer.
"""

from avasskit import (
    AffineMapD,
    Budget,
    Configuration,
    Machine,
    Transition,
    abstract,
    post_star,
    reachable_totally_positive,
)

# One counter doubles (plus one), the other just counts the steps.
doubler = Machine(
    "doubler", 2, ("q",),
    (Transition("q", "q", AffineMapD(((2, 0), (0, 1)), (1, 1))),),
    initial="q",
)

start = Configuration("q", (0, 0))
print("orbit of the doubling loop from (0, 0):")
v = (0, 0)
for step in range(6):
    print(f"  after {step} steps: {v}  "
          f"abstracted at cutoff 4: {abstract(v, 4).entries}")
    v = (2 * v[0] + 1, v[1] + 1)

for goal in (Configuration("q", (15, 4)), Configuration("q", (2, 1))):
    answer = reachable_totally_positive(doubler, start, goal)
    print(f"can reach {goal.render()}? {'yes' if answer else 'no'}")

# The finite abstraction must agree with plain forward exploration wherever
# the latter can finish.
explored = post_star(doubler, start, Budget(max_value=2000))
concrete = {c for c in explored.configs if max(c.counters) <= 500}
for c in sorted(concrete, key=lambda c: c.counters):
    assert reachable_totally_positive(doubler, start, c)
print(f"abstraction confirms all {len(concrete)} concretely reached "
      "configurations up to 500")
