"""
Core value types shared by the simulator, the embedding and the numbers game.

Scalars are plain Python numbers: ``fractions.Fraction`` in exact mode and ``float`` in float mode.  A ``Numeric``
instance carries the mode and the comparison tolerance and is the only place where scalars are compared.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

from hardballs.enums import Mode, Termination
from hardballs.utils import MassException, NumericModeException, StateException, validate

Scalar = Union[Fraction, float]

DEFAULT_TOLERANCE = 1e-9


class Numeric:
    """
    Arithmetic and comparison contract for one run.

    In exact mode values are ``Fraction`` and every comparison is exact.  In float mode two values are equal when
    ``|a - b| <= tol * max(1, |a|, |b|)``; with ``tol=0`` this is plain IEEE comparison.
    """

    def __init__(self, mode: Mode = Mode.float, tol: float = DEFAULT_TOLERANCE) -> None:
        if tol < 0:
            raise ValueError("tolerance must be nonnegative, got {tol}".format(tol=tol))
        self.mode = mode
        self.tol = float(tol)

    @classmethod
    def exact(cls) -> Numeric:
        return cls(Mode.exact)

    @classmethod
    def floating(cls, tol: float = DEFAULT_TOLERANCE) -> Numeric:
        return cls(Mode.float, tol)

    @property
    def is_exact(self) -> bool:
        return self.mode is Mode.exact

    def as_float(self) -> Numeric:
        return Numeric(Mode.float, self.tol)

    def coerce(self, value: Any) -> Scalar:
        """
        Converts ints, floats, ``Fraction`` and strings such as ``"3"``, ``"0.25"`` or ``"1/100"`` to this mode's
        scalar type.  Strings are parsed exactly in both modes before any rounding.
        """
        if isinstance(value, str):
            value = Fraction(value.strip())
        if self.is_exact:
            if isinstance(value, float):
                # decimal repr, not the binary expansion
                return Fraction(repr(value))
            return Fraction(value)
        return float(value)

    def coerce_all(self, values: Iterable[Any]) -> tuple[Scalar, ...]:
        return tuple(self.coerce(value) for value in values)

    def _slack(self, a: Scalar, b: Scalar) -> float:
        return self.tol * max(1.0, abs(a), abs(b))

    def eq(self, a: Scalar, b: Scalar) -> bool:
        if self.is_exact:
            return a == b
        return abs(a - b) <= self._slack(a, b)

    def lt(self, a: Scalar, b: Scalar) -> bool:
        if self.is_exact:
            return a < b
        return a < b and not self.eq(a, b)

    def le(self, a: Scalar, b: Scalar) -> bool:
        return a <= b or self.eq(a, b)

    def gt(self, a: Scalar, b: Scalar) -> bool:
        return self.lt(b, a)

    def ge(self, a: Scalar, b: Scalar) -> bool:
        return self.le(b, a)

    def sign(self, value: Scalar) -> int:
        if self.eq(value, 0):
            return 0
        return 1 if value > 0 else -1

    def close(self, a: Scalar, b: Scalar, factor: float = 10) -> bool:
        """Identity check used by the test suites: equal within ``factor * tol`` (exactly equal in exact mode)."""
        if self.is_exact and isinstance(a, Fraction) and isinstance(b, Fraction):
            return a == b
        a, b = float(a), float(b)
        return abs(a - b) <= factor * self.tol * max(1.0, abs(a), abs(b))

    def sqrt(self, value: Scalar) -> float:
        if self.is_exact:
            raise NumericModeException("square roots are irrational; use float mode")
        return math.sqrt(value)

    def format(self, value: Scalar) -> str:
        if self.is_exact:
            return str(Fraction(value))
        return repr(float(value))

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Numeric) and self.mode is other.mode and self.tol == other.tol

    def __hash__(self) -> int:
        return hash((self.mode, self.tol))

    def __repr__(self) -> str:
        if self.is_exact:
            return "Numeric(exact)"
        return "Numeric(float, tol={tol!r})".format(tol=self.tol)


EXACT = Numeric.exact()
FLOAT = Numeric.floating()


@dataclass(frozen=True)
class MassProfile:
    masses: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "masses", tuple(self.masses))
        if len(self.masses) < 2:
            raise MassException("at least two balls are required, got {count}".format(count=len(self.masses)))
        exc = MassException("masses must be positive, got {masses}".format(masses=[str(m) for m in self.masses]))
        validate(*self.masses, exc=exc, check=lambda mass: mass > 0)

    @classmethod
    def of(cls, values: Iterable[Any], numeric: Numeric = FLOAT) -> MassProfile:
        return cls(numeric.coerce_all(values))

    @property
    def n(self) -> int:
        return len(self.masses) - 1

    def coerce(self, numeric: Numeric) -> MassProfile:
        return MassProfile(numeric.coerce_all(self.masses))

    def __len__(self) -> int:
        return len(self.masses)

    def __getitem__(self, index: int) -> Scalar:
        return self.masses[index]

    def __iter__(self):
        return iter(self.masses)


@dataclass(frozen=True)
class SystemState:
    positions: tuple[Scalar, ...]
    velocities: tuple[Scalar, ...]
    time: Scalar = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "velocities", tuple(self.velocities))
        if len(self.positions) != len(self.velocities):
            raise StateException(
                "positions and velocities differ in length ({p} != {v})".format(
                    p=len(self.positions), v=len(self.velocities)
                )
            )
        if len(self.positions) < 2:
            raise StateException("at least two balls are required")

    @classmethod
    def of(
        cls, positions: Iterable[Any], velocities: Iterable[Any], time: Any = 0, numeric: Numeric = FLOAT
    ) -> SystemState:
        return cls(numeric.coerce_all(positions), numeric.coerce_all(velocities), numeric.coerce(time))

    @property
    def n(self) -> int:
        return len(self.positions) - 1

    def coerce(self, numeric: Numeric) -> SystemState:
        return SystemState(
            numeric.coerce_all(self.positions), numeric.coerce_all(self.velocities), numeric.coerce(self.time)
        )

    def is_ordered(self, numeric: Numeric = FLOAT, strict: bool = True) -> bool:
        compare = numeric.lt if strict else numeric.le
        return all(compare(left, right) for left, right in zip(self.positions, self.positions[1:]))

    def check(self, masses: MassProfile, numeric: Numeric = FLOAT) -> None:
        """Raises ``StateException`` unless the state fits ``masses`` and its positions strictly increase."""
        if len(self.positions) != len(masses):
            raise StateException(
                "state has {balls} balls but the mass profile has {masses}".format(
                    balls=len(self.positions), masses=len(masses)
                )
            )
        if not self.is_ordered(numeric, strict=True):
            raise StateException("positions must be strictly increasing, got {p}".format(p=list(self.positions)))


@dataclass(frozen=True)
class CollisionEvent:
    """
    One instant at which one or more pairwise non-adjacent pairs collide.  Pair ``i`` means ball ``i-1`` hits ball
    ``i``; ``pre`` and ``post`` hold ``(v_{i-1}, v_i)`` for each pair, in the order of ``pairs``.
    """

    time: Scalar
    pairs: tuple[int, ...]
    pre: tuple[tuple[Scalar, Scalar], ...]
    post: tuple[tuple[Scalar, Scalar], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def apply_to(self, velocities: Sequence[Scalar]) -> tuple[Scalar, ...]:
        updated = list(velocities)
        for i, (left, right) in zip(self.pairs, self.post):
            updated[i - 1] = left
            updated[i] = right
        return tuple(updated)


@dataclass(frozen=True)
class CollisionTrace:
    initial: SystemState
    events: tuple[CollisionEvent, ...] = ()
    termination: Termination = Termination.sorted
    final: SystemState | None = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        if self.final is None:
            object.__setattr__(self, "final", self.initial)

    def velocity_history(self) -> list[tuple[Scalar, ...]]:
        """Full velocity vector before the first event and after every event."""
        history = [self.initial.velocities]
        for event in self.events:
            history.append(event.apply_to(history[-1]))
        return history

    def __len__(self) -> int:
        return len(self.events)


def total_collisions(trace: CollisionTrace) -> int:
    return sum(event.size for event in trace.events)


def momentum(masses: Sequence[Scalar], velocities: Sequence[Scalar]) -> Scalar:
    return sum(m * v for m, v in zip(masses, velocities))


def kinetic_energy(masses: Sequence[Scalar], velocities: Sequence[Scalar]) -> Scalar:
    return sum(m * v * v for m, v in zip(masses, velocities)) / 2


@dataclass(frozen=True)
class InversionCount:
    count: int
    # (i, j) pairs whose order was decided within the tolerance
    near_ties: tuple[tuple[int, int], ...] = ()


def count_inversions(values: Sequence[Scalar], numeric: Numeric = FLOAT) -> InversionCount:
    """
    Counts pairs ``i < j`` with ``values[i] > values[j]``.  The order is decided on the difference, so in float mode a
    pair only counts when ``values[i] - values[j]`` clears the tolerance at its own scale; pairs closer than that are
    returned as near ties.
    """
    count = 0
    near_ties = []
    for i, left in enumerate(values):
        for j in range(i + 1, len(values)):
            right = values[j]
            margin = left - right
            if numeric.gt(margin, 0):
                count += 1
            elif not numeric.is_exact and margin != 0 and numeric.eq(margin, 0):
                near_ties.append((i, j))
    return InversionCount(count, tuple(near_ties))


def velocity_inversions(velocities: Sequence[Scalar], numeric: Numeric = FLOAT) -> int:
    """Inversion number of a velocity sequence; with equal masses it counts the collisions still to come."""
    return count_inversions(velocities, numeric).count
