"""
The numbers game on a weighted path.

A position ``p = (p_1, ..., p_n)`` is changed by firing ``i``: ``p_i`` switches sign and ``p_i * k_ij`` is added to
each neighbour ``p_j``.  The potential is the prefix-sum sequence ``q`` of the position augmented with ``p_0 = 0``;
a position is nonnegative exactly when its potential is nondecreasing.  When every ``k_{i,i+1} <= 1`` each negative
firing removes at least one inversion from the potential, so a negative game ends within ``n(n+1)/2`` moves.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from hardballs.enums import Provenance, StrategyName
from hardballs.model import FLOAT, InversionCount, MassProfile, Numeric, Scalar, count_inversions
from hardballs.utils import GameException, MassException, StrategyException, WeightException, bound

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightMatrix:
    """
    Symmetric tridiagonal weights with ``k_ii = -2``.  ``k`` is stored zero-based; ``weight(i, j)`` takes the game's
    one-based indices and returns zero for the augmented indices ``0`` and ``n + 1``.
    """

    k: tuple[tuple[Scalar, ...], ...]
    provenance: Provenance = Provenance.user_supplied
    masses: MassProfile | None = None
    numeric: Numeric = FLOAT

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", tuple(tuple(row) for row in self.k))
        n = len(self.k)
        if n < 1:
            raise WeightException("the weight matrix needs at least one row")
        eq = self.numeric.eq
        for r, row in enumerate(self.k):
            if len(row) != n:
                raise WeightException(
                    "weight matrix is not square: row {r} has {count} entries".format(r=r + 1, count=len(row))
                )
            if not eq(row[r], -2):
                raise WeightException("k_{i}{i} must be -2, got {value}".format(i=r + 1, value=row[r]))
            for s, value in enumerate(row):
                if not eq(value, self.k[s][r]):
                    raise WeightException("weights are not symmetric at ({i}, {j})".format(i=r + 1, j=s + 1))
                if abs(r - s) > 1 and not eq(value, 0):
                    raise WeightException("weights are not tridiagonal at ({i}, {j})".format(i=r + 1, j=s + 1))

    @classmethod
    def from_neighbors(cls, neighbors: Iterable[object], numeric: Numeric = FLOAT) -> WeightMatrix:
        """Builds the matrix from ``k_{12}, k_{23}, ..., k_{n-1,n}``."""
        values = numeric.coerce_all(neighbors)
        n = len(values) + 1
        k = [[numeric.coerce(0)] * n for _ in range(n)]
        for r in range(n):
            k[r][r] = numeric.coerce(-2)
        for r, value in enumerate(values):
            k[r][r + 1] = k[r + 1][r] = value
        return cls(tuple(tuple(row) for row in k), Provenance.user_supplied, None, numeric)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[object]], numeric: Numeric = FLOAT) -> WeightMatrix:
        return cls(tuple(numeric.coerce_all(row) for row in rows), Provenance.user_supplied, None, numeric)

    @property
    def n(self) -> int:
        return len(self.k)

    def weight(self, i: int, j: int) -> Scalar:
        if not 1 <= i <= self.n:
            raise IndexError("index {i} outside 1..{n}".format(i=i, n=self.n))
        if j < 1 or j > self.n:
            return self.numeric.coerce(0)
        return self.k[i - 1][j - 1]

    def neighbors(self) -> tuple[Scalar, ...]:
        return tuple(self.k[r][r + 1] for r in range(self.n - 1))


@dataclass(frozen=True)
class GamePosition:
    values: tuple[Scalar, ...]
    numeric: Numeric = FLOAT

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) < 1:
            raise GameException("a position has at least one component")

    @classmethod
    def of(cls, values: Iterable[object], numeric: Numeric = FLOAT) -> GamePosition:
        return cls(numeric.coerce_all(values), numeric)

    @property
    def n(self) -> int:
        return len(self.values)

    def component(self, i: int) -> Scalar:
        """``p_i`` with the augmentation ``p_0 = p_{n+1} = ... = 0``."""
        if 1 <= i <= self.n:
            return self.values[i - 1]
        return self.numeric.coerce(0)


@dataclass(frozen=True)
class Potential:
    values: tuple[Scalar, ...]
    numeric: Numeric = FLOAT


@dataclass(frozen=True)
class Move:
    index: int
    position: GamePosition
    inversions: int


def weights_from_masses(masses: MassProfile | Sequence[Scalar], numeric: Numeric = FLOAT) -> WeightMatrix:
    m = [float(value) for value in masses]
    if any(value <= 0 for value in m):
        raise MassException("masses must be positive, got {masses}".format(masses=m))

    neighbors = []
    for i in range(1, len(m) - 1):
        left = 2 / (1 / m[i] + 1 / m[i - 1])
        right = 2 / (1 / m[i + 1] + 1 / m[i])
        neighbors.append((1 / m[i]) * numeric.sqrt(left * right))

    n = len(m) - 1
    k = [[0.0] * n for _ in range(n)]
    for r in range(n):
        k[r][r] = -2.0
    for r, value in enumerate(neighbors):
        k[r][r + 1] = k[r + 1][r] = value

    profile = masses if isinstance(masses, MassProfile) else MassProfile(tuple(m))
    return WeightMatrix(tuple(tuple(row) for row in k), Provenance.from_masses, profile, numeric)


def is_certified(k: WeightMatrix) -> bool:
    """True when every ``k_{i,i+1} <= 1``, the condition under which negative games end within n(n+1)/2 moves."""
    return all(k.numeric.le(value, 1) for value in k.neighbors())


def fire(p: GamePosition, k: WeightMatrix, i: int) -> GamePosition:
    if p.n != k.n:
        raise GameException("position has {p} components but the weights are {k}x{k}".format(p=p.n, k=k.n))
    if not 1 <= i <= p.n:
        raise IndexError("index {i} outside 1..{n}".format(i=i, n=p.n))

    values = list(p.values)
    fired = values[i - 1]
    values[i - 1] = -fired
    for j in (i - 1, i + 1):
        if 1 <= j <= p.n:
            values[j - 1] = values[j - 1] + fired * k.weight(i, j)
    return GamePosition(tuple(values), p.numeric)


def is_negative_move(p: GamePosition, i: int) -> bool:
    if not 1 <= i <= p.n:
        raise IndexError("index {i} outside 1..{n}".format(i=i, n=p.n))
    return p.numeric.lt(p.component(i), 0)


def legal_moves(p: GamePosition) -> list[int]:
    return [i for i in range(1, p.n + 1) if is_negative_move(p, i)]


def is_terminal(p: GamePosition) -> bool:
    return all(p.numeric.ge(value, 0) for value in p.values)


def potential(p: GamePosition) -> Potential:
    values = [p.numeric.coerce(0)]
    for value in p.values:
        values.append(values[-1] + value)
    return Potential(tuple(values), p.numeric)


def is_sorted(q: Potential) -> bool:
    # steps of q are the components of p, so compare them against 0 the way is_terminal does
    return all(q.numeric.ge(right - left, 0) for left, right in zip(q.values, q.values[1:]))


def inversion_report(q: Potential) -> InversionCount:
    return count_inversions(q.values, q.numeric)


def inversion_number(q: Potential) -> int:
    report = inversion_report(q)
    if report.near_ties:
        log.warning("Potential has %d near tie(s) within tolerance: %s", len(report.near_ties), list(report.near_ties))
    return report.count


def potential_after_firing(q: Potential, p: GamePosition, k: WeightMatrix, i: int) -> Potential:
    """
    The potential after firing ``i``, written directly in terms of ``q`` rather than through ``fire``::

        q'_j = q_j                                  j <= i - 2
        q'_j = q_i     - p_i (1 - k_{i,i-1})        j == i - 1
        q'_j = q_{i-1} - p_i (1 - k_{i,i-1})        j == i
        q'_j = q_j     - p_i (2 - k_{i,i-1} - k_{i,i+1})   j >= i + 1
    """
    fired = p.component(i)
    left = k.weight(i, i - 1)
    right = k.weight(i, i + 1)
    values = []
    for j, value in enumerate(q.values):
        if j <= i - 2:
            values.append(value)
        elif j == i - 1:
            values.append(q.values[i] - fired * (1 - left))
        elif j == i:
            values.append(q.values[i - 1] - fired * (1 - left))
        else:
            values.append(value - fired * (2 - left - right))
    return Potential(tuple(values), q.numeric)


def firing_correction(p: GamePosition, k: WeightMatrix, i: int) -> tuple[Scalar, ...]:
    """
    What firing ``i`` adds to the potential once ``q_{i-1}`` and ``q_i`` are swapped.  Nondecreasing whenever
    ``p_i < 0`` and both neighbouring weights are at most one.
    """
    fired = p.component(i)
    left = k.weight(i, i - 1)
    right = k.weight(i, i + 1)
    zero = p.numeric.coerce(0)
    correction = []
    for j in range(p.n + 1):
        if j <= i - 2:
            correction.append(zero)
        elif j in (i - 1, i):
            correction.append(-fired * (1 - left))
        else:
            correction.append(-fired * (2 - left - right))
    return tuple(correction)


Strategy = Callable[[GamePosition, Sequence[int]], int]


def leftmost(p: GamePosition, legal: Sequence[int]) -> int:
    return legal[0]


def rightmost(p: GamePosition, legal: Sequence[int]) -> int:
    return legal[-1]


def most_negative(p: GamePosition, legal: Sequence[int]) -> int:
    return min(legal, key=lambda i: (p.component(i), i))


def random_strategy(seed: int | None = None) -> Strategy:
    rng = np.random.default_rng(seed)

    def _choose(p: GamePosition, legal: Sequence[int]) -> int:
        return legal[int(rng.integers(len(legal)))]

    return _choose


def strategy_for(name: StrategyName | str, seed: int | None = None) -> Strategy:
    name = StrategyName(name)
    if name is StrategyName.random:
        return random_strategy(seed)
    return {
        StrategyName.leftmost: leftmost,
        StrategyName.rightmost: rightmost,
        StrategyName.most_negative: most_negative,
    }[name]


def play_negative_game(
    start: GamePosition,
    k: WeightMatrix,
    strategy: Strategy = leftmost,
    max_moves: int | None = None,
    verbose: bool = False,
) -> list[Move]:
    """
    Plays negative moves chosen by ``strategy`` until the position is nonnegative or ``max_moves`` moves were made.

    :param start: Starting position.
    :param k: Weights of the game.
    :param strategy: Picks one index from the legal negative moves.
    :param max_moves: Move limit.  Defaults to ``n(n+1)/2 + 1`` when every ``k_{i,i+1} <= 1``; required otherwise.
    :param verbose: Log every move at DEBUG level.
    :return: One ``Move`` per firing with the position and the potential's inversion number after it.
    """
    if max_moves is None:
        if not is_certified(k):
            raise GameException("max_moves is required when some k_{i,i+1} exceeds 1")
        max_moves = bound(k.n) + 1

    moves: list[Move] = []
    position = start
    if verbose:
        log.debug("Negative game from %s, inversions %d", list(position.values), inversion_number(potential(position)))

    while not is_terminal(position) and len(moves) < max_moves:
        legal = legal_moves(position)
        choice = strategy(position, legal)
        if choice not in legal:
            raise StrategyException(
                "strategy chose {choice}, which is not a negative move (legal: {legal})".format(
                    choice=choice, legal=legal
                )
            )
        position = fire(position, k, choice)
        moves.append(Move(choice, position, inversion_number(potential(position))))
        if verbose:
            log.debug("  fire %d -> %s, inversions %d", choice, list(position.values), moves[-1].inversions)

    return moves


@dataclass(frozen=True)
class LongPlay:
    start: GamePosition
    strategy: StrategyName
    moves: tuple[Move, ...]


def find_long_play(
    k: WeightMatrix,
    limit: int | None = None,
    values: Iterable[int] = range(-5, 6),
    strategies: Iterable[StrategyName | str] = (
        StrategyName.leftmost,
        StrategyName.rightmost,
        StrategyName.most_negative,
    ),
) -> LongPlay | None:
    """
    Exhaustive search over integer starting positions with components in ``values`` for a negative play longer than
    ``limit`` (``n(n+1)/2`` by default).  Returns the first one found, or None.
    """
    limit = bound(k.n) if limit is None else limit
    values = list(values)
    strategies = [StrategyName(name) for name in strategies]
    searched = 0
    for components in itertools.product(values, repeat=k.n):
        start = GamePosition.of(components, k.numeric)
        if is_terminal(start):
            continue
        for name in strategies:
            searched += 1
            moves = play_negative_game(start, k, strategy_for(name, seed=0), max_moves=limit + 1)
            if len(moves) > limit:
                log.info("Play of %d moves from %s with %s", len(moves), list(components), name.value)
                return LongPlay(start, name, tuple(moves))

    log.info("No play longer than %d moves in %d searched plays", limit, searched)
    return None


def uniform_weights(n: int, rng: np.random.Generator, numeric: Numeric = FLOAT) -> WeightMatrix:
    """Random weights with every ``k_{i,i+1}`` drawn from [0, 1]."""
    return WeightMatrix.from_neighbors(rng.uniform(0.0, 1.0, size=max(n - 1, 0)).tolist(), numeric)
