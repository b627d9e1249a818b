"""Semilinear subsets of the naturals: finite unions of guarded arithmetic progressions.

A :class:`Clause` denotes ``{n : lo <= n <= hi and n % modulus == residue}`` with
``hi=None`` meaning unbounded.  A :class:`SemilinearSet` is a finite union of
clauses.  These are exactly the subsets of the naturals definable in one free
variable by quantifier-free linear arithmetic with divisibility, and they are
closed under every operation this module exposes: union, intersection,
complement, inclusion, equality, upward closure.

Equality, inclusion, complement and compaction all go through one canonical
form: a threshold ``T``, a period ``L``, a bitmask of the members below ``T``
and a bitmask of the residues mod ``L`` that are members from ``T`` on.  Masks
are plain Python ints, so set algebra runs at word speed even when ``L`` is in
the millions (which happens when many cycle moduli pile up).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator


def _ones(n: int) -> int:
    return (1 << n) - 1


def _prog_bits(start: int, upper: int, step: int) -> int:
    """Bitmask with bits start, start+step, ... strictly below upper."""
    if start >= upper:
        return 0
    count = (upper - start + step - 1) // step
    if step == 1:
        return _ones(count) << start
    # geometric-series trick: (2^(count*step) - 1) / (2^step - 1) has a bit
    # every `step` positions, `count` of them
    return ((1 << (count * step)) - 1) // ((1 << step) - 1) << start


def _replicate(mask: int, unit: int, copies: int) -> int:
    """Concatenate `copies` copies of a `unit`-bit mask."""
    if copies <= 0:
        return 0
    if copies == 1:
        return mask
    return mask * (((1 << (copies * unit)) - 1) // ((1 << unit) - 1))


@dataclass(frozen=True)
class Clause:
    """One guarded progression ``{n : lo <= n (<= hi) and n ≡ residue (mod modulus)}``.

    Construction normalizes: ``lo`` is clamped to 0 and snapped up to the first
    actual member, a finite ``hi`` is snapped down to the last member, and a
    clause with no members collapses to the canonical empty clause
    ``Clause(1, 0, 1, 0)``.  After that, ``lo`` (and a finite ``hi``) are
    themselves members, which the rest of the package relies on.
    """

    lo: int
    hi: int | None = None
    modulus: int = 1
    residue: int = 0

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"clause modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)
        lo = max(self.lo, 0)
        lo += (self.residue - lo) % self.modulus  # snap up to a member
        hi = self.hi
        if hi is not None:
            hi -= (hi - self.residue) % self.modulus  # snap down to a member
            if hi < lo:
                # canonical empty clause
                object.__setattr__(self, "lo", 1)
                object.__setattr__(self, "hi", 0)
                object.__setattr__(self, "modulus", 1)
                object.__setattr__(self, "residue", 0)
                return
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_empty(self) -> bool:
        return self.hi is not None and self.hi < self.lo

    def member(self, n: int) -> bool:
        if n < self.lo:
            return False
        if self.hi is not None and n > self.hi:
            return False
        return n % self.modulus == self.residue

    def values(self, limit: int) -> Iterator[int]:
        """Members of the clause that are <= limit, ascending."""
        if self.is_empty:
            return
        top = limit if self.hi is None else min(limit, self.hi)
        yield from range(self.lo, top + 1, self.modulus)

    def render(self) -> str:
        if self.is_empty:
            return "[1..0] mod 1 = 0"
        hi = "" if self.hi is None else str(self.hi)
        return f"[{self.lo}..{hi}] mod {self.modulus} = {self.residue}"


EMPTY_CLAUSE = Clause(1, 0, 1, 0)


def intersect_clauses(c1: Clause, c2: Clause) -> Clause:
    """Exact intersection of two clauses (always again a single clause)."""
    if c1.is_empty or c2.is_empty:
        return EMPTY_CLAUSE
    lo = max(c1.lo, c2.lo)
    if c1.hi is None:
        hi = c2.hi
    elif c2.hi is None:
        hi = c1.hi
    else:
        hi = min(c1.hi, c2.hi)
    m1, r1, m2, r2 = c1.modulus, c1.residue, c2.modulus, c2.residue
    g = math.gcd(m1, m2)
    if (r2 - r1) % g != 0:
        return EMPTY_CLAUSE
    l = m1 // g * m2
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g)
    r = (r1 + m1 * t) % l
    return Clause(lo, hi, l, r)


@dataclass(frozen=True)
class SemilinearSet:
    """A finite union of clauses.  Construct via :func:`semilinear` or the helpers."""

    clauses: tuple[Clause, ...]

    # NB: dataclass __eq__ is structural (same clause tuple); use .equal() for
    # the semantic "same subset of the naturals" question.

    @cached_property
    def _canon(self) -> tuple[int, int, int, int]:
        """Canonical form (T, L, finite_mask, residue_mask).

        finite_mask has bit n set iff n < T is a member; residue_mask has bit r
        set iff every n >= T with n ≡ r (mod L) is a member — equivalent, for
        this set, to *some* such n being a member.
        """
        t = 0
        l = 1
        for c in self.clauses:
            if c.hi is None:
                t = max(t, c.lo)
                l = l // math.gcd(l, c.modulus) * c.modulus
            else:
                t = max(t, c.hi + 1)
        fmask = 0
        rmask = 0
        for c in self.clauses:
            upper = t if c.hi is None else min(c.hi + 1, t)
            fmask |= _prog_bits(c.lo, upper, c.modulus)
            if c.hi is None:
                # residues r in [0, L) with r ≡ c.residue (mod c.modulus); since
                # membership above T only depends on n mod c.modulus, and
                # c.lo <= T, the residue class is fully included from T on.
                rmask |= _prog_bits(c.residue % c.modulus, l, c.modulus)
        return (t, l, fmask, rmask)

    def _lifted(self, t: int, l: int) -> tuple[int, int]:
        """Masks of this set relative to a coarser frame (t >= T, L | l)."""
        t0, l0, fmask, rmask = self._canon
        f = fmask
        if t > t0:
            # periodic word anchored at 0 (bit p = rmask[p mod l0]), window [t0, t)
            full = _replicate(rmask, l0, (t + l0 - 1) // l0)
            f |= full & _ones(t) & ~_ones(t0)
        r = _replicate(rmask, l0, l // l0)
        return (f & _ones(t), r)

    def _frame_with(self, other: "SemilinearSet") -> tuple[int, int]:
        t0, l0, _, _ = self._canon
        t1, l1, _, _ = other._canon
        return (max(t0, t1), l0 // math.gcd(l0, l1) * l1)

    def member(self, n: int) -> bool:
        return any(c.member(n) for c in self.clauses)

    def union(self, other: "SemilinearSet") -> "SemilinearSet":
        return semilinear(self.clauses + other.clauses)

    def intersect(self, other: "SemilinearSet") -> "SemilinearSet":
        out = []
        for c1 in self.clauses:
            for c2 in other.clauses:
                out.append(intersect_clauses(c1, c2))
        return semilinear(out)

    def complement(self) -> "SemilinearSet":
        t, l, fmask, rmask = self._canon
        return _from_masks(t, l, ~fmask & _ones(t), ~rmask & _ones(l))

    def equal(self, other: "SemilinearSet") -> bool:
        t, l = self._frame_with(other)
        return self._lifted(t, l) == other._lifted(t, l)

    def subset(self, other: "SemilinearSet") -> bool:
        t, l = self._frame_with(other)
        f0, r0 = self._lifted(t, l)
        f1, r1 = other._lifted(t, l)
        return f0 | f1 == f1 and r0 | r1 == r1

    @property
    def is_empty(self) -> bool:
        return not self.clauses

    def is_full(self) -> bool:
        """True iff the set is all of the naturals."""
        t, l, fmask, rmask = self._canon
        return fmask == _ones(t) and rmask == _ones(l)

    def min_element(self) -> int | None:
        """Least member, or None for the empty set (clause lows are members)."""
        if not self.clauses:
            return None
        return min(c.lo for c in self.clauses)

    def upward_closure(self) -> "SemilinearSet":
        m = self.min_element()
        if m is None:
            return EMPTY
        return interval(m, None)

    def normalized(self) -> "SemilinearSet":
        """Equivalent set rebuilt from the canonical form (compact, deduplicated)."""
        return _from_masks(*self._canon)

    def compact(self) -> "SemilinearSet":
        """Equivalent set with the minimal eventual period and minimal tail starts.

        The canonical form works over the lcm of all clause moduli, often far
        coarser than the set's true eventual period; this rebuilds the set the
        way a person would write it down: one unbounded clause per recurrent
        residue class, pulled down as far as the finite part allows, and the
        leftover finite values grouped into maximal progressions.
        """
        if not self.clauses:
            return EMPTY
        t, l, fmask, rmask = self._canon
        width = _ones(l)
        d = next(k for k in range(1, l + 1) if l % k == 0 and
                 ((rmask >> k) | (rmask << (l - k))) & width == rmask)
        absorbed = 0
        tails = []
        for c in range(d):
            if not rmask >> c & 1:
                continue
            s = t + ((c - t) % d)
            while s - d >= 0 and fmask >> (s - d) & 1:
                s -= d
                absorbed |= 1 << s
            tails.append(Clause(s, None, d, c))
        leftover = [n for n in range(t) if (fmask & ~absorbed) >> n & 1]
        runs = []
        i = 0
        while i < len(leftover):
            step, j = 1, i
            if i + 1 < len(leftover):
                step = leftover[i + 1] - leftover[i]
                j = i + 1
                while j + 1 < len(leftover) and leftover[j + 1] - leftover[j] == step:
                    j += 1
            runs.append(Clause(leftover[i], leftover[j], step, leftover[i]))
            i = j + 1
        out = sorted(runs + tails, key=lambda c: (c.lo, c.modulus, c.residue))
        return SemilinearSet(tuple(out))

    def values(self, limit: int) -> list[int]:
        """Sorted members <= limit."""
        out: set[int] = set()
        for c in self.clauses:
            out.update(c.values(limit))
        return sorted(out)

    def render(self) -> str:
        if not self.clauses:
            return "empty"
        return " ∪ ".join(c.render() for c in self.clauses)

    def to_json_obj(self) -> list[dict]:
        return [
            {"lo": c.lo, "hi": c.hi, "mod": c.modulus, "res": c.residue}
            for c in self.clauses
        ]


def semilinear(clauses: Iterable[Clause]) -> SemilinearSet:
    """Build a set from clauses, dropping empties and structural duplicates."""
    seen = set()
    kept = []
    for c in clauses:
        if c.is_empty or c in seen:
            continue
        seen.add(c)
        kept.append(c)
    return SemilinearSet(tuple(kept))


def _from_masks(t: int, l: int, fmask: int, rmask: int) -> SemilinearSet:
    clauses = []
    # finite part: maximal runs of consecutive set bits below t
    n = 0
    while n < t:
        if fmask >> n & 1:
            start = n
            while n < t and fmask >> n & 1:
                n += 1
            clauses.append(Clause(start, n - 1, 1, 0))
        else:
            n += 1
    for r in range(l):
        if rmask >> r & 1:
            lo = t + (r - t) % l
            clauses.append(Clause(lo, None, l, r))
    return SemilinearSet(tuple(clauses))


EMPTY = SemilinearSet(())
FULL = SemilinearSet((Clause(0, None, 1, 0),))


def singleton(n: int) -> SemilinearSet:
    return SemilinearSet((Clause(n, n, 1, 0),))


def interval(lo: int, hi: int | None = None) -> SemilinearSet:
    c = Clause(lo, hi, 1, 0)
    return semilinear([c])


def from_values(values: Iterable[int]) -> SemilinearSet:
    """Finite set of naturals, as maximal-run interval clauses."""
    vs = sorted(set(values))
    clauses = []
    i = 0
    while i < len(vs):
        j = i
        while j + 1 < len(vs) and vs[j + 1] == vs[j] + 1:
            j += 1
        clauses.append(Clause(vs[i], vs[j], 1, 0))
        i = j + 1
    return SemilinearSet(tuple(clauses))


def from_json_obj(obj: list) -> SemilinearSet:
    clauses = []
    for entry in obj:
        clauses.append(
            Clause(entry["lo"], entry.get("hi"), entry.get("mod", 1), entry.get("res", 0))
        )
    return semilinear(clauses)
