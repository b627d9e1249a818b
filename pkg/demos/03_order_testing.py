"""Test candidate orderings on the naturals for the well-quasi-ordering
property, and inspect the certificates that come back with each verdict.
"""

import random

from avasskit import evaluate, is_wqo, parse_formula

CANDIDATES = [
    "x <= y",
    "y <= x",
    "x <= y and x = y mod 2",
    "x = y mod 3",
    "x = y",
    "x < y",
]

rng = random.Random(7)
for text in CANDIDATES:
    f = parse_formula(text)
    verdict = is_wqo(f)
    print(f"{text!r}: {verdict.kind}")

    if verdict.kind == "not-wqo":
        # The verdict carries an infinite bad sequence; sample its head and
        # confirm that no element relates forward to a later one.
        head = verdict.witness_sequence(12)
        print(f"    bad sequence starts {head}")
        for i, a in enumerate(head):
            for b in head[i + 1:]:
                assert not evaluate(f, {"x": a, "y": b})
    elif verdict.kind == "not-quasi-ordering":
        print(f"    {verdict.failed_axiom} fails at {verdict.counterexample}")
    else:
        # Spot-check the positive claim: random long sequences always
        # contain an ascending pair.
        for _ in range(50):
            seq = [rng.randint(0, 40) for _ in range(120)]
            assert any(evaluate(f, {"x": seq[i], "y": seq[j]})
                       for i in range(len(seq)) for j in range(i + 1, len(seq)))
        print("    ascending pair found in all 50 sampled sequences")
