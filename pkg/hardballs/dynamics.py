"""
Event-driven simulation of point balls on a line.

Between events every ball moves ballistically, so the next collision time of each approaching neighbour pair is a
closed-form ratio of gap to closing speed.  All pairs reaching contact at the earliest time form one event.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from hardballs.enums import Simultaneity, Termination
from hardballs.model import (
    DEFAULT_TOLERANCE,
    EXACT,
    FLOAT,
    CollisionEvent,
    CollisionTrace,
    MassProfile,
    Numeric,
    Scalar,
    SystemState,
    kinetic_energy,
    momentum,
)
from hardballs.utils import (
    CollisionException,
    MassException,
    MultipleCollisionException,
    StateException,
    bound,
    builder,
)

log = logging.getLogger(__name__)


def default_max_events(n: int) -> int:
    return 10 * bound(n) + 100


def _check_cap(max_events: int) -> None:
    if max_events < 1:
        raise ValueError("max_events must be at least 1, got {cap}".format(cap=max_events))


class SimConfig:
    """
    Immutable run configuration.  Every builder method returns a modified copy::

        SimConfig().exact().cap(500).simultaneity(Simultaneity.forbidden)
    """

    def __init__(
        self,
        numeric: Numeric = FLOAT,
        max_events: int | None = None,
        policy: Simultaneity = Simultaneity.error_on_adjacent,
    ) -> None:
        if max_events is not None:
            _check_cap(max_events)
        self._numeric = numeric
        self._max_events = max_events
        self._policy = policy

    @builder
    def exact(self) -> None:
        self._numeric = EXACT

    @builder
    def floating(self, tol: float = DEFAULT_TOLERANCE) -> None:
        self._numeric = Numeric.floating(tol)

    @builder
    def using(self, numeric: Numeric) -> None:
        self._numeric = numeric

    @builder
    def cap(self, max_events: int) -> None:
        _check_cap(max_events)
        self._max_events = max_events

    @builder
    def simultaneity(self, policy: Simultaneity) -> None:
        self._policy = policy

    @property
    def numeric(self) -> Numeric:
        return self._numeric

    @property
    def policy(self) -> Simultaneity:
        return self._policy

    @property
    def max_events(self) -> int | None:
        return self._max_events

    def max_events_for(self, n: int) -> int:
        if self._max_events is not None:
            return self._max_events
        return default_max_events(n)

    def __repr__(self) -> str:
        return "SimConfig({numeric!r}, max_events={cap}, policy={policy})".format(
            numeric=self._numeric, cap=self._max_events, policy=self._policy.value
        )


def collide(
    m_left: Scalar, m_right: Scalar, v_left: Scalar, v_right: Scalar, numeric: Numeric = FLOAT
) -> tuple[Scalar, Scalar]:
    """
    Post-collision velocities of an elastic collision between two balls.

    :param m_left: Mass of the left ball (ball ``i-1``).
    :param m_right: Mass of the right ball (ball ``i``).
    :param v_left: Velocity of the left ball, must exceed ``v_right``.
    :param v_right: Velocity of the right ball.
    :return: ``(v'_left, v'_right)``; momentum and kinetic energy are preserved and the balls separate.
    """
    m_left, m_right, v_left, v_right = numeric.coerce_all((m_left, m_right, v_left, v_right))
    if not (m_left > 0 and m_right > 0):
        raise MassException("masses must be positive, got {left} and {right}".format(left=m_left, right=m_right))
    if not numeric.gt(v_left, v_right):
        raise CollisionException(
            "balls are not approaching: v_left={left} <= v_right={right}".format(left=v_left, right=v_right)
        )

    total = m_left + m_right
    new_left = ((m_left - m_right) * v_left + 2 * m_right * v_right) / total
    new_right = (2 * m_left * v_left + (m_right - m_left) * v_right) / total
    return new_left, new_right


@dataclass(frozen=True)
class NextEvent:
    time: Scalar
    pairs: tuple[int, ...]


def next_event(state: SystemState, masses: MassProfile, numeric: Numeric = FLOAT) -> NextEvent | None:
    """
    Earliest future contact between neighbours, with every pair reaching contact at that time (under ``numeric``
    equality).  Returns None when the velocities no longer decrease anywhere from left to right.
    """
    if len(masses) != len(state.positions):
        raise StateException("state and mass profile differ in length")

    x, v = state.positions, state.velocities
    candidates = []
    for i in range(1, len(x)):
        if numeric.gt(v[i - 1], v[i]):
            candidates.append((state.time + (x[i] - x[i - 1]) / (v[i - 1] - v[i]), i))

    if not candidates:
        return None

    earliest = min(t for t, _ in candidates)
    pairs = tuple(sorted(i for t, i in candidates if numeric.eq(t, earliest)))
    return NextEvent(earliest, pairs)


def _shares_ball(pairs: tuple[int, ...]) -> bool:
    return any(right - left == 1 for left, right in zip(pairs, pairs[1:]))


def step(state: SystemState, masses: MassProfile, config: SimConfig) -> tuple[SystemState, CollisionEvent] | None:
    """
    Advances to the next event and applies ``collide`` to each of its pairs.  Returns None when no collision can
    happen any more.  Pairs of one event are pairwise non-adjacent, so the order in which they are applied does not
    matter.
    """
    numeric = config.numeric
    upcoming = next_event(state, masses, numeric)
    if upcoming is None:
        return None

    pairs = upcoming.pairs
    if _shares_ball(pairs) or (config.policy is Simultaneity.forbidden and len(pairs) > 1):
        raise MultipleCollisionException(upcoming.time, pairs)

    dt = upcoming.time - state.time
    positions = [x + v * dt for x, v in zip(state.positions, state.velocities)]
    velocities = list(state.velocities)
    pre, post = [], []
    for i in pairs:
        # the pair is in contact; rounding must not leave it crossed
        contact = (positions[i - 1] + positions[i]) / 2
        positions[i - 1] = positions[i] = contact

        before = (velocities[i - 1], velocities[i])
        after = collide(masses[i - 1], masses[i], before[0], before[1], numeric=numeric)
        velocities[i - 1], velocities[i] = after
        pre.append(before)
        post.append(after)

    new_state = SystemState(tuple(positions), tuple(velocities), upcoming.time)
    return new_state, CollisionEvent(upcoming.time, pairs, tuple(pre), tuple(post))


def simulate(
    initial: SystemState, masses: MassProfile, config: SimConfig | None = None, verbose: bool = False
) -> CollisionTrace:
    """
    Runs the system until no collision is possible, the event cap is hit, or a multiple collision occurs.

    :param initial: Starting state; positions must be strictly increasing.
    :param masses: Mass profile of the same length.
    :param config: Numeric mode, event cap and simultaneity policy.  Defaults to ``SimConfig()``.
    :param verbose: Log every event at DEBUG level.
    :return: The collision trace.  A ``MultipleCollisionException`` carries the partial trace in ``exc.trace``.
    """
    config = config or SimConfig()
    numeric = config.numeric
    masses = masses.coerce(numeric)
    initial = initial.coerce(numeric)
    initial.check(masses, numeric)
    cap = config.max_events_for(masses.n)

    if verbose:
        log.debug("Simulating %d balls, %r, cap=%d", len(masses), numeric, cap)

    state = initial
    events: list[CollisionEvent] = []
    while True:
        try:
            result = step(state, masses, config)
        except MultipleCollisionException as exc:
            exc.trace = CollisionTrace(initial, tuple(events), Termination.multiple_collision, state)
            log.info("Multiple collision after %d event(s): %s", len(events), exc)
            raise

        if result is None:
            termination = Termination.sorted
            break
        if len(events) >= cap:
            termination = Termination.event_cap_reached
            log.info("Event cap %d reached before the velocities were sorted", cap)
            break

        state, event = result
        events.append(event)
        if verbose:
            log.debug("  event %d at t=%s: pairs %s", len(events), numeric.format(event.time), list(event.pairs))

    return CollisionTrace(initial, tuple(events), termination, state)


def conservation_residuals(
    trace: CollisionTrace, masses: MassProfile, numeric: Numeric = FLOAT
) -> tuple[Scalar, Scalar]:
    """
    Largest drift of total momentum and of kinetic energy across the trace, relative to ``max(1, |initial|)``.
    Both are exactly zero in exact mode.
    """
    masses = masses.coerce(numeric)
    history = [numeric.coerce_all(velocities) for velocities in trace.velocity_history()]
    p0 = momentum(masses, history[0])
    e0 = kinetic_energy(masses, history[0])
    p_scale = max(1, abs(p0))
    e_scale = max(1, abs(e0))

    p_drift = max(abs(momentum(masses, velocities) - p0) / p_scale for velocities in history)
    e_drift = max(abs(kinetic_energy(masses, velocities) - e0) / e_scale for velocities in history)
    return p_drift, e_drift
