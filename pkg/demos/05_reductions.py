"""Two classic constructions, made executable.

First: a two-counter machine is packed into a single counter by storing
(a, b) as 2^a * 3^b, with each operation becoming a relational update on
the packed value.  Second: a word-matching puzzle is compiled into a
two-counter machine whose final state is reachable exactly when the puzzle
has a solution.
"""

from avasskit import (
    Budget,
    Configuration,
    MinskyOp,
    Machine,
    PCPInstance,
    Transition,
    apply_payload,
    build_n1,
    build_pcp_machine,
    evaluate,
    find_path,
    is_functional,
    pcp_witness,
    serialize_payload,
)

counter_machine = Machine(
    "twocount", 2, ("run", "drain"),
    (
        Transition("run", "run", MinskyOp("inc", 1)),
        Transition("run", "drain", MinskyOp("zero", 2)),
        Transition("drain", "drain", MinskyOp("dec", 1)),
        Transition("drain", "run", MinskyOp("inc", 2)),
    ),
    initial="run",
)

packed = build_n1(counter_machine, halt="drain")
print("packed transitions (value n stands for counters a, b with n = 2^a 3^b):")
for t in packed.transitions:
    print(f"  {t.source} -> {t.target} : {serialize_payload(t.payload)}")
report = is_functional(packed)
print(f"every update is functional: {report.all_functional}")

# March both machines in lock-step for a few moves and watch the packed
# value track the counters.
trail = [("run", (0, 0)), ("run", (1, 0)), ("run", (2, 0)),
         ("drain", (2, 0)), ("drain", (1, 0)), ("run", (1, 1))]
moves = [0, 0, 1, 2, 3]
value = 1
print("\nlock-step walk:")
for move, ((_, before), (state, after)) in zip(moves, zip(trail, trail[1:])):
    stepped = apply_payload(counter_machine.transitions[move].payload, before)
    assert stepped == after
    next_value = 2 ** after[0] * 3 ** after[1]
    formula = packed.transitions[move].payload.formula
    assert evaluate(formula, {"x": value, "x'": next_value})
    print(f"  {before} -> {after}   packs as   {value} -> {next_value}")
    value = next_value

# --- the word puzzle -----------------------------------------------------

tiles = PCPInstance((("1", "101"), ("10", "00"), ("011", "11")))
order = pcp_witness(tiles)
top = "".join(tiles.tiles[i - 1][0] for i in order)
bottom = "".join(tiles.tiles[i - 1][1] for i in order)
print(f"\ntile order {order} spells {top!r} on both rows"
      + ("" if top == bottom else " FAILED"))

machine = build_pcp_machine(tiles)
steps, _ = find_path(machine, Configuration("q0", (0, 0)),
                     Configuration("q2", (0, 0)), Budget(max_value=1024))
print(f"compiled machine reaches its final state in {len(steps)} steps")

impossible = PCPInstance((("0", "1"),))
assert pcp_witness(impossible) is None
steps, _ = find_path(build_pcp_machine(impossible), Configuration("q0", (0, 0)),
                     Configuration("q2", (0, 0)), Budget(max_value=1024))
print(f"unsolvable instance: machine search finds {steps!r}")
