"""Tour of the yes/no questions the package can answer about a machine:
reachability, coverability (two independent routes), control-state
reachability, well-structuredness, and strong monotony.
"""

from avasskit import (
    Configuration,
    control_state_reachable,
    coverable,
    coverable_via_reduction,
    is_strongly_monotone,
    is_well_structured,
    machine_m1,
    machine_m2,
    reachable,
)


def show(label, value):
    print(f"  {label:<46} {'yes' if value else 'no'}")


one, two = machine_m1(), machine_m2()
goal = Configuration("q1", (19,))

print("exact reachability:")
show("q1:0  ->  q1:19  in m1", reachable(one, Configuration("q1", (0,)), goal))
show("q1:10 ->  q1:19  in m1", reachable(one, Configuration("q1", (10,)), goal))

print("\ncoverability (reach q1 with counter >= 19):")
for n in (0, 10, 25):
    src = Configuration("q1", (n,))
    direct = coverable(one, src, goal)
    via = coverable_via_reduction(one, src, goal)
    assert direct == via  # the widening construction is equivalent, always
    show(f"q1:{n} covers q1:19 in m1", direct)
print("  (both routes computed; they agreed on every query)")

print("\ncontrol-state reachability:")
show("m1 from q2:5 can enter q1", control_state_reachable(one, Configuration("q2", (5,)), "q1"))

print("\nstructural properties:")
wsts_one = is_well_structured(one)
wsts_two = is_well_structured(two)
show("m1 is well-structured", wsts_one.well_structured)
print(f"    {wsts_one.render()}")
show("m2 is well-structured", wsts_two.well_structured)
show("m1 is strongly monotone", is_strongly_monotone(one).strongly_monotone)
show("m2 is strongly monotone", is_strongly_monotone(two).strongly_monotone)
