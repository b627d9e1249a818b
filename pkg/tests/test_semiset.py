"""Semilinear set algebra, checked against a naive arithmetic oracle."""

from __future__ import annotations

import random

from avasskit.semiset import (
    EMPTY,
    FULL,
    Clause,
    SemilinearSet,
    from_json_obj,
    from_values,
    interval,
    intersect_clauses,
    semilinear,
    singleton,
)


# --- independent oracle: direct arithmetic, no clause normalization ---------

def naive_members(specs, bound):
    """specs: iterable of (lo, hi_or_None, mod, res) exactly as written."""
    out = set()
    for lo, hi, mod, res in specs:
        for n in range(bound + 1):
            if n < lo:
                continue
            if hi is not None and n > hi:
                continue
            if n % mod == res % mod:
                out.add(n)
    return out


def as_specs(s: SemilinearSet):
    return [(c.lo, c.hi, c.modulus, c.residue) for c in s.clauses]


def check_against_oracle(s: SemilinearSet, specs, bound):
    want = naive_members(specs, bound)
    got = {n for n in range(bound + 1) if s.member(n)}
    assert got == want


# --- clause normalization ----------------------------------------------------

def test_clause_snaps_bounds_to_members():
    c = Clause(5, 20, 3, 1)
    assert (c.lo, c.hi) == (7, 19)
    assert c.member(7) and c.member(19)
    assert not c.member(6) and not c.member(20)


def test_clause_negative_lo_clamped():
    c = Clause(-7, None, 4, 2)
    assert c.lo == 2
    assert c.member(2) and c.member(6)


def test_clause_empty_collapses():
    c = Clause(10, 4)
    assert c.is_empty
    assert (c.lo, c.hi, c.modulus, c.residue) == (1, 0, 1, 0)
    # no members in a window even after normalization
    assert not any(c.member(n) for n in range(50))


def test_clause_bad_modulus_rejected():
    for m in (0, -2):
        try:
            Clause(0, None, m, 0)
        except ValueError:
            pass
        else:
            raise AssertionError("modulus < 1 accepted")


def test_constructor_drops_empty_and_duplicate_clauses():
    s = semilinear([Clause(3, 1), Clause(2, 9, 2, 0), Clause(2, 9, 2, 0)])
    assert len(s.clauses) == 1


# --- frozen membership / operation examples ---------------------------------

def test_member_example_19_mod3():
    s = semilinear([Clause(19, None, 3, 1)])
    assert s.member(19)
    assert s.member(22)
    assert not s.member(20)
    assert not s.member(16)  # below lo even though residue matches


def test_intersect_crt_example():
    a = semilinear([Clause(0, None, 2, 0)])
    b = semilinear([Clause(0, None, 3, 0)])
    c = a.intersect(b)
    assert c.member(0) and c.member(6) and c.member(12)
    assert not c.member(2) and not c.member(3) and not c.member(4)
    check_against_oracle(c, [(0, None, 6, 0)], 100)


def test_complement_of_full_is_empty():
    assert FULL.complement().equal(EMPTY)
    assert EMPTY.complement().equal(FULL)
    assert FULL.is_full()
    assert not EMPTY.is_full()


def test_min_element_examples():
    s = semilinear([Clause(13, None, 3, 2)])
    assert s.min_element() == 14
    assert singleton(0).min_element() == 0
    assert EMPTY.min_element() is None


def test_upward_closure_example():
    s = semilinear([Clause(13, None, 3, 1)])
    up = s.upward_closure()
    assert up.equal(interval(13, None))
    assert up.clauses[0].modulus == 1


def test_upward_closure_idempotent_extensive():
    rng = random.Random(7)
    for _ in range(50):
        s = random_set(rng)
        up = s.upward_closure()
        assert s.subset(up)
        assert up.upward_closure().equal(up)


# --- canonical form ----------------------------------------------------------

def test_canonicalization_preserves_membership():
    rng = random.Random(11)
    for _ in range(100):
        s = random_set(rng)
        t, l, _, _ = s._canon
        n = s.normalized()
        for v in range(t + 2 * l + 2):
            assert s.member(v) == n.member(v), (s.render(), n.render(), v)
        assert s.equal(n)


def test_structural_vs_semantic_equality():
    a = semilinear([Clause(0, None, 2, 0), Clause(1, None, 2, 1)])
    b = FULL
    assert a.equal(b)
    assert a != b  # dataclass equality is structural on purpose


# --- randomized algebra vs oracle -------------------------------------------

def random_clause(rng: random.Random) -> Clause:
    lo = rng.randrange(0, 40)
    hi = None if rng.random() < 0.5 else lo + rng.randrange(0, 40)
    mod = rng.choice([1, 1, 2, 3, 4, 5, 6, 7, 12])
    return Clause(lo, hi, mod, rng.randrange(mod))


def random_set(rng: random.Random) -> SemilinearSet:
    return semilinear([random_clause(rng) for _ in range(rng.randrange(0, 4))])


def test_union_intersect_complement_pointwise():
    rng = random.Random(20260822)
    for _ in range(150):
        a = random_set(rng)
        b = random_set(rng)
        bound = 250
        av = {n for n in range(bound + 1) if a.member(n)}
        bv = {n for n in range(bound + 1) if b.member(n)}
        u = a.union(b)
        i = a.intersect(b)
        c = a.complement()
        for n in range(bound + 1):
            assert u.member(n) == (n in av or n in bv)
            assert i.member(n) == (n in av and n in bv)
            assert c.member(n) == (n not in av)


def test_equal_subset_agree_with_exhaustive_scan():
    rng = random.Random(99)
    for _ in range(120):
        a = random_set(rng)
        b = random_set(rng)
        t, l = a._frame_with(b)
        bound = t + 2 * l + 2
        av = [a.member(n) for n in range(bound)]
        bv = [b.member(n) for n in range(bound)]
        assert a.equal(b) == (av == bv)
        assert a.subset(b) == all(y for x, y in zip(av, bv) if x)
        assert a.subset(a) and a.equal(a)


def test_intersect_clauses_against_oracle():
    rng = random.Random(5)
    for _ in range(200):
        c1 = random_clause(rng)
        c2 = random_clause(rng)
        c = intersect_clauses(c1, c2)
        for n in range(200):
            assert c.member(n) == (c1.member(n) and c2.member(n)), (
                c1.render(), c2.render(), c.render(), n)


# --- helpers, rendering, json ------------------------------------------------

def test_from_values_merges_runs():
    s = from_values([3, 1, 2, 7, 8, 10])
    assert as_specs(s) == [(1, 3, 1, 0), (7, 8, 1, 0), (10, 10, 1, 0)]
    assert s.values(20) == [1, 2, 3, 7, 8, 10]


def test_render_forms():
    assert semilinear([Clause(13, None, 3, 1)]).render() == "[13..] mod 3 = 1"
    assert singleton(19).render() == "[19..19] mod 1 = 0"
    assert EMPTY.render() == "empty"
    two = semilinear([Clause(0, 4), Clause(9, None, 2, 1)])
    assert two.render() == "[0..4] mod 1 = 0 ∪ [9..] mod 2 = 1"


def test_json_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        s = random_set(rng)
        j = s.to_json_obj()
        back = from_json_obj(j)
        assert back.equal(s)
    assert from_json_obj([{"lo": 19, "hi": None, "mod": 3, "res": 1}]).member(22)


def test_compact_recovers_minimal_period():
    # Three mod-39 residue clauses that together are just "multiples of 3
    # from 6 on": the compacted form finds the period-3 structure again.
    spread = semilinear([Clause(6 + 39 * 0, None, 39, 6),
                         Clause(9, None, 39, 9)] +
                        [Clause(6 + 3 * k, None, 39, (6 + 3 * k) % 39)
                         for k in range(13)])
    got = spread.compact()
    assert as_specs(got) == [(6, None, 3, 0)]

    mixed = semilinear([Clause(0, 0), Clause(3, 3), Clause(6, 6),
                        Clause(13, None, 3, 1)])
    assert as_specs(mixed.compact()) == [(0, 6, 3, 0), (13, None, 3, 1)]


def test_compact_pulls_tail_starts_down():
    # 5 and 8 sit right below the unbounded clause on its own stride.
    s = semilinear([Clause(5, 5), Clause(8, 8), Clause(11, None, 3, 2)])
    assert as_specs(s.compact()) == [(5, None, 3, 2)]


def test_compact_keeps_detached_finite_values():
    s = semilinear([Clause(2, 2), Clause(11, None, 3, 2)])
    assert as_specs(s.compact()) == [(2, 2, 1, 0), (11, None, 3, 2)]


def test_compact_preserves_membership_and_is_idempotent():
    rng = random.Random(4500)
    for _ in range(400):
        s = random_set(rng)
        c = s.compact()
        assert c.equal(s)
        assert c.compact() == c
    assert EMPTY.compact() == EMPTY
    assert as_specs(FULL.compact()) == [(0, None, 1, 0)]
