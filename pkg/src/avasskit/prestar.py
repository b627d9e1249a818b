"""Exact backward reachability for single-counter affine machines.

``compute_pre_star`` returns, per control state, the exact semilinear set of
counter values from which a target configuration is reachable.  The fixpoint
sweeps two exact operations until nothing changes:

* :func:`pre_transition` — the preimage of a semilinear set under one
  transition's affine update (guards included);
* :func:`pre_cycle_star` — the predecessors through *any positive number* of
  turns around one simple cycle, in closed form.  The cycle's composed update
  ``n -> a*n + b`` and its entry guard decide the shape: finite guards are
  enumerated; translation cycles (a = 1) reduce to per-residue-class least/
  greatest witness elements; growth cycles (a >= 2) split into an explicitly
  enumerated low region and residue-class tails with computable thresholds;
  constant cycles (a = 0) collapse to a single membership test.

Acceleration through cycles is what makes the sweep reach a fixpoint at all:
transition preimages alone would descend through an unbounded chain.  A sweep
cap turns divergence (or an enumeration blow-up) into BudgetExceededError —
reported as a defect of the run, never as a verdict.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .errors import BudgetExceededError, FlavorError
from .machine import (
    AffineMap1,
    Configuration,
    Machine,
    Transition,
    UpwardTarget,
    effective_domain,
)
from .semiset import (
    EMPTY,
    EMPTY_CLAUSE,
    Clause,
    SemilinearSet,
    from_values,
    intersect_clauses,
    interval,
    semilinear,
    singleton,
)

log = logging.getLogger(__name__)


def _cdiv(a: int, b: int) -> int:
    """ceil(a / b) for b > 0."""
    return -((-a) // b)


# --------------------------------------------------------------------------
# preimages of single transitions


def _affine_preimage_clause(alpha: int, beta: int, c: Clause) -> Clause:
    """{n >= 0 : alpha*n + beta is a member of the clause}, as one clause."""
    if c.is_empty:
        return EMPTY_CLAUSE
    if alpha == 0:
        return Clause(0, None) if c.member(beta) else EMPTY_CLAUSE
    if alpha > 0:
        lo = _cdiv(c.lo - beta, alpha)
        hi = (c.hi - beta) // alpha if c.hi is not None else None
        rhs = c.residue - beta
        mul = alpha
    else:
        k = -alpha
        lo = _cdiv(beta - c.hi, k) if c.hi is not None else 0
        hi = (beta - c.lo) // k
        rhs = beta - c.residue
        mul = k
    g = math.gcd(mul, c.modulus)
    if rhs % g != 0:
        return EMPTY_CLAUSE
    m2 = c.modulus // g
    if m2 == 1:
        return Clause(max(lo, 0), hi, 1, 0)
    n0 = (rhs // g * pow(mul // g, -1, m2)) % m2
    return Clause(max(lo, 0), hi, m2, n0)


def pre_transition(p: AffineMap1, s: SemilinearSet) -> SemilinearSet:
    """Exact one-step preimage: {n in the payload's domain : a*n + b in s}."""
    if p.a == 0:
        return effective_domain(p) if s.member(p.b) else EMPTY
    pre = semilinear(_affine_preimage_clause(p.a, p.b, c) for c in s.clauses)
    return pre.intersect(effective_domain(p))


# --------------------------------------------------------------------------
# simple cycles


@dataclass(frozen=True)
class SimpleCycle:
    """A simple cycle rooted at one of its states.

    ``meta`` is the composed affine update of one full turn; ``guard`` is the
    single clause of entry values from which the whole turn can be taken (the
    intersection of every step's domain and user guard, pulled back through
    the prefix maps).  A cycle through k states appears once per root, so a
    rotation class of size k yields k entries with identical meta and guard.
    """

    root: str
    transitions: tuple[Transition, ...]
    meta: AffineMap1
    guard: Clause


def _domain_clause(p: AffineMap1) -> Clause:
    if p.a > 0:
        base = Clause(_cdiv(-p.b, p.a) if p.b < 0 else 0, None)
    elif p.a == 0:
        base = Clause(0, None) if p.b >= 0 else EMPTY_CLAUSE
    else:
        base = Clause(0, p.b // -p.a) if p.b >= 0 else EMPTY_CLAUSE
    if p.guard is not None:
        base = intersect_clauses(base, p.guard)
    return base


def _build_cycle(root: str, steps: list[Transition]) -> SimpleCycle | None:
    alpha, beta = 1, 0
    guard = Clause(0, None)
    for t in steps:
        dc = _domain_clause(t.payload)
        guard = intersect_clauses(guard, _affine_preimage_clause(alpha, beta, dc))
        if guard.is_empty:
            return None
        alpha, beta = t.payload.a * alpha, t.payload.a * beta + t.payload.b
    return SimpleCycle(root, tuple(steps), AffineMap1(alpha, beta), guard)


DEFAULT_CYCLE_CAP = 100_000


def enumerate_simple_cycles(m: Machine, cap: int = DEFAULT_CYCLE_CAP) -> list[SimpleCycle]:
    """Every simple cycle, once per root state it contains, nonempty guards only.

    Deterministic order: roots in state declaration order, paths in transition
    declaration order.  Raises BudgetExceededError past ``cap`` entries.
    """
    if m.flavor != "affine1":
        raise FlavorError("cycle analysis is for 1-dim affine machines")
    out: list[SimpleCycle] = []
    emitted = 0

    for root in m.states:
        def dfs(state: str, visited: frozenset[str], path: list[Transition]) -> None:
            nonlocal emitted
            for t in m.transitions_from(state):
                if t.target == root:
                    emitted += 1
                    if emitted > cap:
                        raise BudgetExceededError(
                            f"more than {cap} simple cycle entries")
                    cyc = _build_cycle(root, path + [t])
                    if cyc is not None:
                        out.append(cyc)
                elif t.target not in visited:
                    dfs(t.target, visited | {t.target}, path + [t])

        dfs(root, frozenset([root]), [])
    return out


# --------------------------------------------------------------------------
# cycle acceleration

GUARD_ENUM_CAP = 200_000
CLASS_MODULUS_CAP = 20_000


def pre_cycle_star(cycle: SimpleCycle, s: SemilinearSet) -> SemilinearSet:
    """s plus all values that reach s through >= 1 full turns of the cycle.

    A value n qualifies when there is i >= 1 with every intermediate value
    n, f(n), …, f^{i-1}(n) inside the guard and f^i(n) in s, where f is the
    cycle's composed update.
    """
    a, b = cycle.meta.a, cycle.meta.b
    g = cycle.guard
    if g.is_empty or s.is_empty:
        return s
    if g.hi is not None:
        return s.union(_cycle_pre_enumerated(a, b, g, s, g.hi))
    if a < 0:
        # infinite guard with a shrinking map cannot happen for built cycles
        # (the last step's domain pullback bounds the guard); enumerate anyway.
        bound = b // -a if b >= 0 else -1
        if bound < 0:
            return s
        return s.union(_cycle_pre_enumerated(a, b, g, s, bound))
    if a == 0:
        return s.union(semilinear([g]) if s.member(b) else EMPTY)
    if a == 1:
        if b == 0:
            return s
        return s.union(_cycle_pre_translation(b, g, s))
    return s.union(_cycle_pre_growth(a, b, g, s))


def _cycle_pre_enumerated(a: int, b: int, g: Clause, s: SemilinearSet,
                          bound: int) -> SemilinearSet:
    starts = list(g.values(bound))
    if len(starts) > GUARD_ENUM_CAP:
        raise BudgetExceededError(
            f"cycle guard enumeration of {len(starts)} values over budget")
    hit = []
    for n in starts:
        v = n
        seen: set[int] = set()
        while g.member(v) and v not in seen:
            seen.add(v)
            v = a * v + b
            if v < 0:
                break
            if s.member(v):
                hit.append(n)
                break
    return from_values(hit)


def _cycle_pre_translation(b: int, g: Clause, s: SemilinearSet) -> SemilinearSet:
    """Acceleration of n -> n + b (b != 0) under an upward-unbounded guard."""
    beta = abs(b)
    r, gm, gr = g.lo, g.modulus, g.residue
    if beta > GUARD_ENUM_CAP:
        raise BudgetExceededError(f"translation step {beta} over budget")
    out: list[Clause] = []
    if beta % gm != 0:
        # the guard congruence breaks after one application, so i = 1 only:
        # n in guard and n + b in s
        for x in s.clauses:
            shifted = Clause(
                max(x.lo - b, 0),
                x.hi - b if x.hi is not None else None,
                x.modulus, (x.residue - b) % x.modulus)
            out.append(intersect_clauses(shifted, g))
        return semilinear(out)
    for x in s.clauses:
        for c_res in range(beta):
            if c_res % gm != gr:
                continue
            if b < 0:
                # least landing value m = n - i*beta with m ≡ n (mod beta),
                # m in x, and the last guarded input m + beta >= r
                mclause = intersect_clauses(
                    Clause(max(r - beta, 0), None, beta, c_res), x)
                if mclause.is_empty:
                    continue
                out.append(Clause(mclause.lo + beta, None, beta, c_res))
            else:
                # some landing value m = n + i*beta >= n + beta must be in x
                mclause = intersect_clauses(Clause(0, None, beta, c_res), x)
                if mclause.is_empty:
                    continue
                if mclause.hi is None:
                    out.append(Clause(max(r, 0), None, beta, c_res))
                else:
                    out.append(Clause(max(r, 0), mclause.hi - beta, beta, c_res))
    return semilinear(out)


def _cycle_pre_growth(a: int, b: int, g: Clause, s: SemilinearSet) -> SemilinearSet:
    """Acceleration of n -> a*n + b (a >= 2) under an upward-unbounded guard."""
    r, gm, gr = g.lo, g.modulus, g.residue
    period = gm
    for c in s.clauses:
        period = period // math.gcd(period, c.modulus) * c.modulus
    if period > CLASS_MODULUS_CAP:
        raise BudgetExceededError(
            f"growth-cycle residue analysis modulus {period} over budget")
    strict_from = _cdiv(1 - b, a - 1)  # a*n + b >= n + 1 from here on
    low = max(strict_from, r, 0)

    tail_clauses = _growth_tail_clauses(a, b, g, s, low, period)
    tail = semilinear(tail_clauses)

    # explicit region: guarded starts up to `low`; orbits either die on the
    # guard, repeat, or climb past `low` into the tail regime
    hit = []
    for n in g.values(low):
        v = n
        seen: set[int] = set()
        member = False
        while True:
            if not g.member(v) or v in seen:
                break
            seen.add(v)
            v = a * v + b
            if s.member(v):
                member = True
                break
            if v > low:
                member = tail.member(v)
                break
        if member:
            hit.append(n)
    return from_values(hit).union(tail)


def _growth_tail_clauses(a: int, b: int, g: Clause, s: SemilinearSet,
                         low: int, period: int) -> list[Clause]:
    """Clauses over starting values u > low whose growth orbit reaches s.

    Values above ``low`` strictly increase and satisfy the guard's interval
    part outright, so only residues matter: per starting class mod ``period``
    the residue trajectory is eventually periodic.  Hits inside the periodic
    part cover the whole class above ``low``; hits before the trajectory's
    guard-residue validity breaks contribute threshold clauses with exact
    cutoffs u >= ceil((clause.lo - c_j) / a^j).
    """
    gm, gr = g.modulus, g.residue
    out: list[Clause] = []
    finite_his = [c.hi for c in s.clauses if c.hi is not None]
    step_cap = period + 80 + (max(finite_his) + 2).bit_length() if finite_his \
        else period + 80

    for rho in range(period):
        if rho % gm != gr:
            continue  # the very first turn is already forbidden
        x = rho          # residue of the current orbit value mod `period`
        pj, cj = 1, 0    # exact a^j and offset c_j: value after j turns is a^j*u + c_j
        j = 0
        seen = {x: 0}
        loop_start: int | None = None
        periodic = False
        inf_hits: list[tuple[int, int, int, int]] = []  # (step, a^j, c_j, clause.lo)
        alive = [c for c in s.clauses if c.hi is not None]
        while True:
            if x % gm != gr:
                break  # current value is an invalid input; orbit ends here
            x = (a * x + b) % period
            pj, cj = pj * a, a * cj + b
            j += 1
            if j > step_cap:
                raise BudgetExceededError(
                    "growth-cycle residue trajectory did not settle")
            for cl in s.clauses:
                if x % cl.modulus != cl.residue:
                    continue
                if cl.hi is None:
                    if not periodic:
                        inf_hits.append((j, pj, cj, cl.lo))
                else:
                    out.append(Clause(
                        max(low + 1, _cdiv(cl.lo - cj, pj)),
                        (cl.hi - cj) // pj, period, rho))
            alive = [cl for cl in alive if pj * (low + 1) + cj <= cl.hi]
            if loop_start is None:
                if x in seen:
                    # state recurrence: hits at steps >= seen[x] replay forever,
                    # earlier ones never do (their states are off the loop)
                    loop_start = seen[x]
                    if any(h >= loop_start for h, _, _, _ in inf_hits):
                        periodic = True
                        out.append(Clause(low + 1, None, period, rho))
                        inf_hits = []
                else:
                    seen[x] = j
            if loop_start is not None and not alive:
                break
        for _, pj_h, cj_h, clause_lo in inf_hits:
            out.append(Clause(
                max(low + 1, _cdiv(clause_lo - cj_h, pj_h)), None, period, rho))
    return out


# --------------------------------------------------------------------------
# the fixpoint


@dataclass(frozen=True)
class PreStarResult:
    """Per-state predecessor sets of a target, plus how many sweeps it took."""

    machine: Machine
    target: Configuration | UpwardTarget
    sets: dict[str, SemilinearSet]
    sweeps: int

    def set_for(self, state: str) -> SemilinearSet:
        return self.sets[state]


DEFAULT_SWEEP_CAP = 1000


def _check_flavor(m: Machine) -> None:
    if m.flavor != "affine1":
        raise FlavorError("symbolic backward reachability needs a 1-dim affine machine")


def _pre_star_fixpoint(m: Machine, target: Configuration | UpwardTarget,
                       seed: SemilinearSet, max_sweeps: int,
                       cycle_cap: int) -> PreStarResult:
    _check_flavor(m)
    cycles_by_root: dict[str, list[SimpleCycle]] = {q: [] for q in m.states}
    for cyc in enumerate_simple_cycles(m, cycle_cap):
        cycles_by_root[cyc.root].append(cyc)

    sets = {q: EMPTY for q in m.states}
    sets[target.state] = seed
    for sweep in range(1, max_sweeps + 1):
        changed = False
        for q in m.states:
            acc = sets[q]
            for t in m.transitions_from(q):
                acc = acc.union(pre_transition(t.payload, sets[t.target]))
            for cyc in cycles_by_root[q]:
                acc = pre_cycle_star(cyc, acc)
            if not acc.equal(sets[q]):
                sets[q] = acc.normalized()
                changed = True
        if not changed:
            log.debug("backward fixpoint for %s settled after %d sweeps",
                      target.render(), sweep)
            return PreStarResult(m, target, sets, sweep)
    raise BudgetExceededError(
        f"no backward fixpoint after {max_sweeps} sweeps")


def compute_pre_star(m: Machine, target: Configuration, *,
                     max_sweeps: int = DEFAULT_SWEEP_CAP,
                     cycle_cap: int = DEFAULT_CYCLE_CAP) -> PreStarResult:
    """Exact predecessor sets of one configuration, per control state."""
    _check_flavor(m)
    m.check_configuration(target)
    return _pre_star_fixpoint(m, target, singleton(target.counter),
                              max_sweeps, cycle_cap)


def compute_pre_star_upward(m: Machine, target: UpwardTarget, *,
                            max_sweeps: int = DEFAULT_SWEEP_CAP,
                            cycle_cap: int = DEFAULT_CYCLE_CAP) -> PreStarResult:
    """Exact predecessor sets of the upward closure of a configuration."""
    _check_flavor(m)
    m.check_configuration(target.config)
    return _pre_star_fixpoint(m, target, interval(target.config.counter, None),
                              max_sweeps, cycle_cap)
