"""Counter machines: control states plus counter-updating transitions.

One machine holds transitions of exactly one payload flavor:

* ``AffineMap1`` — one counter, ``x' = a*x + b``, defined where the result is a
  natural and an optional extra guard clause holds;
* ``AffineMapD`` — d counters, ``x' = A x + b``, defined where every component
  of the result is a natural;
* ``MinskyOp`` — increment / decrement / zero-test of a single counter;
* ``RelationalUpdate`` — an arbitrary quantifier-free formula between current
  and next counter values (not necessarily functional).

The flavor determines which analyses apply; :func:`classify` answers the
syntactic questions the decision procedures dispatch on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from .errors import FlavorError, MachineError
from .semiset import EMPTY, FULL, Clause, SemilinearSet, interval, semilinear


@dataclass(frozen=True)
class AffineMap1:
    """Single-counter update ``x' = a*x + b`` with an optional guard clause.

    Defined on ``{n : a*n + b >= 0}`` intersected with the guard; applying it
    outside that domain yields no successor.
    """

    a: int
    b: int
    guard: Clause | None = None


@dataclass(frozen=True)
class AffineMapD:
    """d-counter update ``x' = A x + b``, defined where ``A x + b`` is componentwise natural."""

    matrix: tuple[tuple[int, ...], ...]
    offset: tuple[int, ...]

    def __post_init__(self) -> None:
        d = len(self.offset)
        if len(self.matrix) != d or any(len(row) != d for row in self.matrix):
            raise MachineError(
                f"matrix must be {d}x{d} to match the offset vector")


MINSKY_OPS = ("inc", "dec", "zero")


@dataclass(frozen=True)
class MinskyOp:
    """One counter-machine operation on counter ``counter`` (1-based): inc, dec, or zero-test."""

    op: str
    counter: int

    def __post_init__(self) -> None:
        if self.op not in MINSKY_OPS:
            raise MachineError(f"unknown counter op {self.op!r}")
        if self.counter < 1:
            raise MachineError("counters are numbered from 1")


@dataclass(frozen=True)
class RelationalUpdate:
    """Transition relation given as a formula over current and next counters.

    Variable naming convention: dimension 1 uses ``x`` and ``x'``; dimension d
    uses ``x1..xd`` and ``x1'..xd'`` (see :func:`relational_variables`).
    """

    formula: object


Payload = Union[AffineMap1, AffineMapD, MinskyOp, RelationalUpdate]


def relational_variables(dimension: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if dimension == 1:
        return ("x",), ("x'",)
    pre = tuple(f"x{i}" for i in range(1, dimension + 1))
    return pre, tuple(f"{v}'" for v in pre)


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    payload: Payload


@dataclass(frozen=True)
class Configuration:
    """A control state plus counter values (a tuple, one entry per dimension)."""

    state: str
    counters: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.counters, tuple):
            object.__setattr__(self, "counters", tuple(self.counters))
        if any(c < 0 for c in self.counters) or not self.counters:
            raise MachineError(f"counters must be naturals, got {self.counters}")

    @property
    def counter(self) -> int:
        if len(self.counters) != 1:
            raise MachineError("single-counter access on a multi-counter configuration")
        return self.counters[0]

    def render(self) -> str:
        return f"{self.state}:{','.join(str(c) for c in self.counters)}"


@dataclass(frozen=True)
class UpwardTarget:
    """The upward closure of a configuration: same state, componentwise >= counters."""

    config: Configuration

    @property
    def state(self) -> str:
        return self.config.state

    def render(self) -> str:
        return f"^{self.config.render()}"


_FLAVOR_BY_TYPE = {
    AffineMap1: "affine1",
    AffineMapD: "affined",
    MinskyOp: "minsky",
    RelationalUpdate: "relational",
}


@dataclass(frozen=True)
class Machine:
    name: str
    dimension: int
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: str | None = None

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise MachineError("dimension must be >= 1")
        if len(set(self.states)) != len(self.states):
            raise MachineError("duplicate state names")
        known = set(self.states)
        if self.initial is not None and self.initial not in known:
            raise MachineError(f"initial state {self.initial!r} not declared")
        flavors = set()
        for t in self.transitions:
            if t.source not in known or t.target not in known:
                raise MachineError(
                    f"transition {t.source} -> {t.target} uses undeclared states")
            flavors.add(_FLAVOR_BY_TYPE[type(t.payload)])
            self._check_payload(t.payload)
        if len(flavors) > 1:
            raise MachineError(
                f"one machine must keep to one flavor, found {sorted(flavors)}")

    def _check_payload(self, p: Payload) -> None:
        if isinstance(p, AffineMap1) and self.dimension != 1:
            raise MachineError("scalar affine payload on a multi-counter machine")
        if isinstance(p, AffineMapD) and len(p.offset) != self.dimension:
            raise MachineError(
                f"payload dimension {len(p.offset)} != machine dimension {self.dimension}")
        if isinstance(p, MinskyOp) and p.counter > self.dimension:
            raise MachineError(
                f"op touches counter {p.counter} but machine has {self.dimension}")

    @property
    def flavor(self) -> str:
        for t in self.transitions:
            return _FLAVOR_BY_TYPE[type(t.payload)]
        return "affine1" if self.dimension == 1 else "affined"

    @cached_property
    def _outgoing(self) -> dict[str, tuple[Transition, ...]]:
        out: dict[str, list[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            out[t.source].append(t)
        return {q: tuple(ts) for q, ts in out.items()}

    @cached_property
    def _incoming(self) -> dict[str, tuple[Transition, ...]]:
        inc: dict[str, list[Transition]] = {q: [] for q in self.states}
        for t in self.transitions:
            inc[t.target].append(t)
        return {q: tuple(ts) for q, ts in inc.items()}

    def transitions_from(self, state: str) -> tuple[Transition, ...]:
        return self._outgoing[state]

    def transitions_to(self, state: str) -> tuple[Transition, ...]:
        return self._incoming[state]

    def check_configuration(self, c: Configuration) -> None:
        if c.state not in self._outgoing:
            raise MachineError(f"unknown state {c.state!r}")
        if len(c.counters) != self.dimension:
            raise MachineError(
                f"configuration has {len(c.counters)} counters, machine has {self.dimension}")


@dataclass(frozen=True)
class Classification:
    """Syntactic flavor flags; see :func:`classify` for the exact conventions."""

    is_vass: bool
    is_avass: bool
    is_positive_avass: bool
    is_totally_positive_avass: bool
    is_minsky: bool
    is_functional_syntactically: bool


def _matrix_of(p: Payload, dim: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]] | None:
    """(A, b) view of an affine payload, None for non-affine ones."""
    if isinstance(p, AffineMap1):
        return ((p.a,),), (p.b,)
    if isinstance(p, AffineMapD):
        return p.matrix, p.offset
    return None


def classify(m: Machine) -> Classification:
    """Syntactic classification of a machine, stable under state renaming/reordering.

    Affine flavors: a VASS has every matrix equal to the identity (guards are
    not consulted); positive means all matrix entries >= 0; totally positive
    additionally needs all offsets >= 0.  Counter-op flavor: zero-tests break
    the affine classes (they are guards, not maps), decrements additionally
    break total positivity.  A machine counts as Minsky when its flavor is the
    counter-op one, or when it is a VASS whose offsets are zero or unit
    vectors (each step a single inc/dec/no-op).  Relational machines get all
    affine flags False: the payload shape does not exhibit a map.
    """
    fl = m.flavor
    if fl == "relational":
        return Classification(False, False, False, False, False, False)
    if fl == "minsky":
        no_zero = all(t.payload.op != "zero" for t in m.transitions)
        no_dec = all(t.payload.op != "dec" for t in m.transitions)
        return Classification(
            is_vass=no_zero,
            is_avass=no_zero,
            is_positive_avass=no_zero,
            is_totally_positive_avass=no_zero and no_dec,
            is_minsky=True,
            is_functional_syntactically=True,
        )
    identity = tuple(
        tuple(1 if i == j else 0 for j in range(m.dimension))
        for i in range(m.dimension)
    )
    is_vass = True
    positive = True
    totally = True
    unit_offsets = True
    for t in m.transitions:
        mat, off = _matrix_of(t.payload, m.dimension)
        if mat != identity:
            is_vass = False
        if any(e < 0 for row in mat for e in row):
            positive = False
        if any(b < 0 for b in off):
            totally = False
        if sum(abs(b) for b in off) > 1:
            unit_offsets = False
    return Classification(
        is_vass=is_vass,
        is_avass=True,
        is_positive_avass=positive,
        is_totally_positive_avass=positive and totally,
        is_minsky=is_vass and unit_offsets,
        is_functional_syntactically=True,
    )


def apply_payload(p: Payload, counters: tuple[int, ...]) -> tuple[int, ...] | None:
    """Successor counters under a functional payload, or None when undefined."""
    if isinstance(p, AffineMap1):
        (n,) = counters
        v = p.a * n + p.b
        if v < 0:
            return None
        if p.guard is not None and not p.guard.member(n):
            return None
        return (v,)
    if isinstance(p, AffineMapD):
        out = []
        for row, b in zip(p.matrix, p.offset):
            v = sum(c * x for c, x in zip(row, counters)) + b
            if v < 0:
                return None
            out.append(v)
        return tuple(out)
    if isinstance(p, MinskyOp):
        i = p.counter - 1
        if p.op == "inc":
            return counters[:i] + (counters[i] + 1,) + counters[i + 1:]
        if p.op == "dec":
            if counters[i] == 0:
                return None
            return counters[:i] + (counters[i] - 1,) + counters[i + 1:]
        return counters if counters[i] == 0 else None
    raise FlavorError(
        "relational payloads are not functional; applying them needs a target value")


def apply(m: Machine, t: Transition, c: Configuration) -> Configuration | None:
    """One step of a functional machine, or None when the payload is undefined at c
    (or c is not at the transition's source state)."""
    m.check_configuration(c)
    if c.state != t.source:
        return None
    got = apply_payload(t.payload, c.counters)
    if got is None:
        return None
    return Configuration(t.target, got)


def effective_domain(p: AffineMap1) -> SemilinearSet:
    """The set of counter values where a scalar affine payload is defined."""
    if p.a > 0:
        lo = (-p.b + p.a - 1) // p.a if p.b < 0 else 0
        dom = interval(lo, None)
    elif p.a == 0:
        dom = FULL if p.b >= 0 else EMPTY
    else:
        if p.b < 0:
            dom = EMPTY
        else:
            dom = interval(0, p.b // -p.a)
    if p.guard is not None:
        dom = dom.intersect(semilinear([p.guard]))
    return dom


def negative_transitions(m: Machine) -> list[Transition]:
    """Transitions of a 1-dim affine machine with a < 0 and a nonempty domain."""
    if m.flavor != "affine1":
        raise FlavorError("negative-transition analysis is for 1-dim affine machines")
    out = []
    for t in m.transitions:
        if t.payload.a < 0 and not effective_domain(t.payload).is_empty:
            out.append(t)
    return out


def successors(m: Machine, c: Configuration) -> Iterator[tuple[Transition, Configuration]]:
    """All one-step successors of a configuration of a functional machine."""
    m.check_configuration(c)
    for t in m.transitions_from(c.state):
        got = apply_payload(t.payload, c.counters)
        if got is not None:
            yield t, Configuration(t.target, got)
