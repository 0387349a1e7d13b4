"""
Mass conditions, the bridge from simulated traces to numbers-game plays, and randomised experiments around the
n(n+1)/2 collision bound.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hardballs.dynamics import SimConfig, collide, simulate
from hardballs.enums import Termination
from hardballs.game import (
    GamePosition,
    fire,
    inversion_number,
    is_negative_move,
    potential,
    weights_from_masses,
)
from hardballs.model import (
    EXACT,
    FLOAT,
    CollisionTrace,
    MassProfile,
    Numeric,
    Scalar,
    SystemState,
    total_collisions,
)
from hardballs.utils import (
    CriticalFindingException,
    MassException,
    MismatchException,
    MultipleCollisionException,
    bound,
    validate,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionReport:
    geometric_ok: bool
    arithmetic_ok: bool
    # m_i^2 - m_{i-1} m_{i+1} for each interior ball
    geometric_margins: tuple[Scalar, ...]
    # m_i - (m_{i-1} + m_{i+1}) / 2 for each interior ball
    arithmetic_margins: tuple[Scalar, ...]
    weights_ok: bool
    # k_{i,i+1} as floats, for display
    weights: tuple[float, ...]

    @property
    def converse_gap(self) -> bool:
        """The weights pass although the geometric-mean condition fails."""
        return self.weights_ok and not self.geometric_ok


def check_conditions(masses: MassProfile | Sequence[Scalar], numeric: Numeric = FLOAT) -> ConditionReport:
    """
    Evaluates the geometric-mean and arithmetic-mean conditions on every interior ball and whether every
    ``k_{i,i+1} <= 1``.  The weight test compares ``k_{i,i+1}^2`` with one, so it is exact in exact mode.  Profiles
    without an interior ball pass vacuously.
    """
    m = numeric.coerce_all(masses)
    exc = MassException("masses must be positive, got {masses}".format(masses=[str(x) for x in m]))
    validate(*m, exc=exc, check=lambda x: x > 0)

    geometric, arithmetic, weights = [], [], []
    geometric_ok = arithmetic_ok = weights_ok = True
    for i in range(1, len(m) - 1):
        geometric.append(m[i] * m[i] - m[i - 1] * m[i + 1])
        arithmetic.append(m[i] - (m[i - 1] + m[i + 1]) / 2)
        geometric_ok = geometric_ok and numeric.ge(m[i] * m[i], m[i - 1] * m[i + 1])
        arithmetic_ok = arithmetic_ok and numeric.ge(2 * m[i], m[i - 1] + m[i + 1])

        # k_{i,i+1}^2 = 4 / (m_i^2 (1/m_i + 1/m_{i-1}) (1/m_{i+1} + 1/m_i))
        scale = m[i] * m[i] * (1 / m[i] + 1 / m[i - 1]) * (1 / m[i + 1] + 1 / m[i])
        weights_ok = weights_ok and numeric.le(4, scale)
        weights.append(math.sqrt(4 / float(scale)))

    report = ConditionReport(
        geometric_ok, arithmetic_ok, tuple(geometric), tuple(arithmetic), weights_ok, tuple(weights)
    )
    if report.converse_gap:
        log.info("Weights pass but the geometric-mean condition fails for %s", [str(x) for x in m])
    return report


def game_position_of_state(
    masses: MassProfile | Sequence[Scalar], velocities: Sequence[Scalar], numeric: Numeric = FLOAT
) -> GamePosition:
    """``p_i = (v_i - v_{i-1}) / sqrt(1/m_i + 1/m_{i-1})``, always as floats."""
    m = [float(x) for x in masses]
    v = [float(x) for x in velocities]
    if len(m) != len(v):
        raise MassException("{count} velocities for {balls} masses".format(count=len(v), balls=len(m)))
    values = [(v[i] - v[i - 1]) / math.sqrt(1 / m[i] + 1 / m[i - 1]) for i in range(1, len(m))]
    return GamePosition(tuple(values), numeric.as_float())


@dataclass(frozen=True)
class CertificateReport:
    # inversion number of the potential before the first event and after every event
    inversions: tuple[int, ...]
    weights_ok: bool
    # first event whose inversion drop was smaller than its pair count
    failed_event: int | None = None

    @property
    def valid(self) -> bool:
        return self.failed_event is None

    @property
    def events(self) -> int:
        return len(self.inversions) - 1


def cross_validate(
    trace: CollisionTrace, masses: MassProfile, numeric: Numeric = FLOAT, verbose: bool = False
) -> CertificateReport:
    """
    Replays the trace as numbers-game firings and compares the game against the simulator after every event.

    Each collided pair must be a negative move, and after each event the game position must match the position
    computed from the simulated velocities within ``10 * tol``.  Either failure raises ``MismatchException``.  When
    every ``k_{i,i+1} <= 1`` the inversion number of the potential must also drop by at least the number of pairs in
    each event; the first event where it does not is reported in ``failed_event``.
    """
    numeric = numeric.as_float()
    weights = weights_from_masses(masses, numeric)
    weights_ok = check_conditions(masses, numeric).weights_ok
    history = trace.velocity_history()

    position = game_position_of_state(masses, history[0], numeric)
    inversions = [inversion_number(potential(position))]
    failed_event = None
    for index, event in enumerate(trace.events):
        for i in event.pairs:
            if not is_negative_move(position, i):
                raise MismatchException(
                    index, position.values, None, reason="pair {i} is not a negative move".format(i=i)
                )
            position = fire(position, weights, i)

        simulated = game_position_of_state(masses, history[index + 1], numeric)
        if not all(numeric.close(a, b) for a, b in zip(position.values, simulated.values)):
            raise MismatchException(index, position.values, simulated.values)

        count = inversion_number(potential(position))
        if weights_ok and failed_event is None and inversions[-1] - count < event.size:
            log.warning("Inversion number went %d -> %d at event %d", inversions[-1], count, index)
            failed_event = index
        inversions.append(count)
        if verbose:
            log.debug("  event %d pairs %s: inversions %d", index, list(event.pairs), count)

    return CertificateReport(tuple(inversions), weights_ok, failed_event)


def max_collision_initial(n: int, numeric: Numeric = EXACT) -> tuple[MassProfile, SystemState]:
    """
    Equal masses with velocities ``n, n-1, ..., 0``.  With equal masses the balls trade velocities, so collisions
    happen where free trajectories cross and the run has exactly n(n+1)/2 collisions.  Each gap is the smallest
    integer that keeps every crossing time distinct, so no two collisions share an instant.
    """
    if n < 1:
        raise ValueError("n must be at least 1, got {n}".format(n=n))
    velocities = [n - j for j in range(n + 1)]
    positions = [Fraction(0)]
    crossings: set[Fraction] = set()
    for j in range(1, n + 1):
        gap = 1
        while True:
            x = positions[-1] + gap
            times = {(x - positions[a]) / (velocities[a] - velocities[j]) for a in range(j)}
            # one crossing per earlier ball, none shared with each other or with earlier pairs
            if len(times) == j and not times & crossings:
                break
            gap += 1
        positions.append(x)
        crossings |= times
    return MassProfile.of([1] * (n + 1), numeric), SystemState.of(positions, velocities, 0, numeric)


def wedge_collision_bound(masses: MassProfile | Sequence[Scalar], numeric: Numeric = FLOAT) -> int:
    """
    Three balls are a billiard in a planar wedge of angle ``arccos(k_{12} / 2)``; no trajectory there hits the walls
    more than ``ceil(pi / angle)`` times.
    """
    if len(masses) != 3:
        raise ValueError("the wedge bound needs exactly three balls")
    numeric = numeric.as_float()
    k = weights_from_masses(masses, numeric).weight(1, 2)
    ratio = math.pi / math.acos(k / 2)
    nearest = round(ratio)
    if numeric.eq(ratio, nearest):
        return int(nearest)
    return math.ceil(ratio)


def time_stepped_collision_count(
    masses: MassProfile | Sequence[Scalar], state: SystemState, dt: float = 1e-4, max_steps: int = 10**7
) -> int:
    """
    Fixed-step oracle: moves every ball by ``v * dt`` and then resolves each neighbour pair that has crossed while
    still approaching with ``collide``.  Independent of the event scheduler; agrees with it when ``dt`` is small
    against the time between collisions.
    """
    raw = Numeric.floating(0.0)
    m = [float(x) for x in masses]
    x = [float(value) for value in state.positions]
    v = [float(value) for value in state.velocities]
    n = len(m) - 1

    count = 0
    for _ in range(max_steps):
        if all(v[i - 1] <= v[i] for i in range(1, n + 1)):
            return count
        x = [position + velocity * dt for position, velocity in zip(x, v)]
        resolved = True
        while resolved:
            resolved = False
            for i in range(1, n + 1):
                if x[i - 1] >= x[i] and v[i - 1] > v[i]:
                    v[i - 1], v[i] = collide(m[i - 1], m[i], v[i - 1], v[i], numeric=raw)
                    count += 1
                    resolved = True

    log.warning("Time-stepped oracle stopped after %d steps with %d collisions", max_steps, count)
    return count


MassSampler = Callable[[np.random.Generator, int, Numeric], MassProfile]
VelocitySampler = Callable[[np.random.Generator, int, Numeric], Sequence[Scalar]]
PositionSampler = Callable[[np.random.Generator, int, Numeric], Sequence[Scalar]]


def _profile(values: Sequence[float], numeric: Numeric) -> MassProfile:
    if not numeric.is_exact:
        return MassProfile(tuple(float(value) for value in values))
    return MassProfile(tuple(Fraction(float(value)).limit_denominator(10**6) for value in values))


def conforming_mass_sampler(rng: np.random.Generator, n: int, numeric: Numeric = FLOAT) -> MassProfile:
    """
    Log-masses with nonincreasing increments, i.e. a concave sequence, which is the geometric-mean condition in log
    space.
    """
    steps = np.sort(rng.uniform(-1.5, 1.5, size=n))[::-1]
    logs = np.concatenate([[0.0], np.cumsum(steps)])
    profile = _profile(np.exp(logs), numeric)
    if numeric.is_exact and not check_conditions(profile, numeric).geometric_ok:
        # rounding to small denominators broke a tight margin
        profile = MassProfile(numeric.coerce_all(float(value) for value in np.exp(logs)))
    return profile


def log_uniform_mass_sampler(rng: np.random.Generator, n: int, numeric: Numeric = FLOAT) -> MassProfile:
    return _profile(np.exp(rng.uniform(-3.0, 3.0, size=n + 1)), numeric)


class PinnedMasses:
    """Mass sampler that always returns the same profile."""

    def __init__(self, masses: Sequence[object]) -> None:
        self.masses = tuple(masses)

    def __call__(self, rng: np.random.Generator, n: int, numeric: Numeric = FLOAT) -> MassProfile:
        if len(self.masses) != n + 1:
            raise MassException("{count} pinned masses for n={n}".format(count=len(self.masses), n=n))
        return MassProfile.of(self.masses, numeric)


def integer_velocity_sampler(rng: np.random.Generator, n: int, numeric: Numeric = FLOAT) -> tuple[Scalar, ...]:
    """Integers in [-n, n] with every pair of neighbours distinct."""
    velocities: list[int] = []
    while len(velocities) < n + 1:
        value = int(rng.integers(-n, n + 1))
        if velocities and value == velocities[-1]:
            continue
        velocities.append(value)
    return numeric.coerce_all(velocities)


def generic_position_sampler(rng: np.random.Generator, n: int, numeric: Numeric = FLOAT) -> tuple[Scalar, ...]:
    """Starts at zero with gaps drawn from 1 + {0, 1/997, ..., 996/997}."""
    positions = [Fraction(0)]
    for offset in rng.integers(0, 997, size=n):
        positions.append(positions[-1] + 1 + Fraction(int(offset), 997))
    return numeric.coerce_all(positions)


@dataclass(frozen=True)
class Finding:
    masses: MassProfile
    state: SystemState
    count: int
    # the run hit the event cap, so the true count is at least ``count``
    capped: bool
    geometric_ok: bool
    trial: int = 0

    @property
    def count_label(self) -> str:
        return ">= {count}".format(count=self.count) if self.capped else str(self.count)


@dataclass(frozen=True)
class _Outcome:
    trial: int
    masses: MassProfile
    state: SystemState
    count: int | None
    capped: bool
    geometric_ok: bool
    converse_gap: bool


@dataclass
class SearchResult:
    findings: list[Finding] = field(default_factory=list)
    trials: int = 0
    conforming: int = 0
    # trials that ran into a multiple collision
    aborted: int = 0
    converse_gaps: int = 0

    def __iter__(self):
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)


def _run_trial(job: tuple) -> _Outcome:
    trial, seed_sequence, n, mass_sampler, velocity_sampler, position_sampler, config = job
    numeric = config.numeric
    rng = np.random.default_rng(seed_sequence)
    masses = mass_sampler(rng, n, numeric)
    velocities = velocity_sampler(rng, n, numeric)
    positions = position_sampler(rng, n, numeric)
    state = SystemState(positions, velocities, numeric.coerce(0))
    report = check_conditions(masses, numeric)

    try:
        trace = simulate(state, masses, config)
    except MultipleCollisionException:
        return _Outcome(trial, masses, state, None, False, report.geometric_ok, report.converse_gap)
    capped = trace.termination is Termination.event_cap_reached
    return _Outcome(
        trial, masses, state, total_collisions(trace), capped, report.geometric_ok, report.converse_gap
    )


def search_violations(
    n: int,
    mass_sampler: MassSampler = conforming_mass_sampler,
    velocity_sampler: VelocitySampler = integer_velocity_sampler,
    trials: int = 100,
    seed: int = 0,
    config: SimConfig | None = None,
    position_sampler: PositionSampler = generic_position_sampler,
    workers: int = 1,
    verbose: bool = False,
) -> SearchResult:
    """
    Samples ``trials`` systems of ``n + 1`` balls and collects those with more than n(n+1)/2 collisions.

    Each trial draws from its own generator spawned from ``seed``, so results do not depend on ``workers``.  Trials
    ending in a multiple collision are counted in ``aborted`` and skipped.  A finding whose masses satisfy the
    geometric-mean condition raises ``CriticalFindingException``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1, got {trials}".format(trials=trials))
    config = config or SimConfig()
    children = np.random.SeedSequence(seed).spawn(trials)
    jobs = [
        (trial, child, n, mass_sampler, velocity_sampler, position_sampler, config)
        for trial, child in enumerate(children)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial, jobs))
    else:
        outcomes = [_run_trial(job) for job in jobs]

    limit = bound(n)
    result = SearchResult(trials=trials)
    for outcome in outcomes:
        result.conforming += outcome.geometric_ok
        result.converse_gaps += outcome.converse_gap
        if outcome.count is None:
            result.aborted += 1
            if verbose:
                log.debug("  trial %d: multiple collision, skipped", outcome.trial)
            continue
        if verbose:
            log.debug("  trial %d: %d collision(s)", outcome.trial, outcome.count)
        if outcome.count <= limit:
            continue

        finding = Finding(
            outcome.masses, outcome.state, outcome.count, outcome.capped, outcome.geometric_ok, outcome.trial
        )
        if finding.geometric_ok:
            log.error("Conforming profile exceeded %d collisions: %s", limit, finding)
            raise CriticalFindingException(finding)
        result.findings.append(finding)

    log.info(
        "%d trial(s), %d conforming, %d finding(s), %d aborted",
        result.trials,
        result.conforming,
        len(result.findings),
        result.aborted,
    )
    return result
