"""
Mass-weighted embedding of the velocity profile into E^{n+1}.

With ``v = sum(sqrt(m_j) v_j 1_j)`` momentum is ``(m, v)`` and kinetic energy ``|v|^2 / 2``, and a collision between
balls ``i-1`` and ``i`` is the orthogonal reflection in the hyperplane with unit normal ``alpha_i``.  Everything here
involves square roots, so float mode only.

Indices follow the balls: ``alpha_i`` couples balls ``i-1`` and ``i`` and ``i`` runs over ``1..n``.  The numpy arrays
are zero-based (row ``r`` holds ``alpha_{r+1}``); use the ``*_at`` accessors for one-based lookups.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from hardballs.model import FLOAT, MassProfile, Numeric, Scalar
from hardballs.utils import MassException, NumericModeException, StateException

log = logging.getLogger(__name__)


def _float_masses(masses: MassProfile | Sequence[Scalar], numeric: Numeric) -> np.ndarray:
    if numeric.is_exact:
        raise NumericModeException("the embedding needs square roots; use float mode")
    values = np.array([float(m) for m in masses])
    if np.any(values <= 0):
        raise MassException("masses must be positive, got {masses}".format(masses=values.tolist()))
    return values


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError("index {i} outside 1..{n}".format(i=i, n=n))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GramData:
    n: int
    masses: tuple[float, ...]
    alpha: np.ndarray
    m_vec: np.ndarray
    gram: np.ndarray
    weights: np.ndarray

    def alpha_at(self, i: int) -> np.ndarray:
        _check_index(i, self.n)
        return self.alpha[i - 1]

    def gram_at(self, i: int, j: int) -> float:
        _check_index(i, self.n)
        _check_index(j, self.n)
        return float(self.gram[i - 1, j - 1])

    def weight_at(self, i: int, j: int) -> float:
        """``k_ij``; zero for the augmented indices ``j = 0`` and ``j = n + 1``."""
        _check_index(i, self.n)
        if j < 1 or j > self.n:
            return 0.0
        return float(self.weights[i - 1, j - 1])


@dataclass(frozen=True, eq=False)
class VelocityVector:
    coords: np.ndarray

    def __len__(self) -> int:
        return len(self.coords)


def build_embedding(masses: MassProfile | Sequence[Scalar], numeric: Numeric = FLOAT) -> GramData:
    m = _float_masses(masses, numeric)
    n = len(m) - 1
    root = np.sqrt(m)

    alpha = np.zeros((n, n + 1))
    for i in range(1, n + 1):
        alpha[i - 1, i] = 1.0 / root[i]
        alpha[i - 1, i - 1] = -1.0 / root[i - 1]
    alpha /= np.linalg.norm(alpha, axis=1, keepdims=True)

    gram = alpha @ alpha.T
    gram = (gram + gram.T) / 2
    weights = -2.0 * gram

    return GramData(
        n=n,
        masses=tuple(m.tolist()),
        alpha=_frozen(alpha),
        m_vec=_frozen(root),
        gram=_frozen(gram),
        weights=_frozen(weights),
    )


def embed_velocities(
    masses: MassProfile | Sequence[Scalar], velocities: Sequence[Scalar], numeric: Numeric = FLOAT
) -> VelocityVector:
    m = _float_masses(masses, numeric)
    if len(m) != len(velocities):
        raise StateException(
            "{count} velocities for {balls} masses".format(count=len(velocities), balls=len(m))
        )
    return VelocityVector(_frozen(np.sqrt(m) * np.array([float(v) for v in velocities])))


def decode_velocities(masses: MassProfile | Sequence[Scalar], v: VelocityVector) -> tuple[float, ...]:
    m = _float_masses(masses, FLOAT)
    return tuple((v.coords / np.sqrt(m)).tolist())


def reflect(g: GramData, v: VelocityVector, i: int) -> VelocityVector:
    a = g.alpha_at(i)
    return VelocityVector(_frozen(v.coords - 2.0 * float(a @ v.coords) * a))


def collision_coordinate(g: GramData, v: VelocityVector, i: int) -> float:
    """``(alpha_i, v)``, negative exactly when ball ``i-1`` is faster than ball ``i``."""
    return float(g.alpha_at(i) @ v.coords)


def momentum_of(g: GramData, v: VelocityVector) -> float:
    return float(g.m_vec @ v.coords)


def energy_of(v: VelocityVector) -> float:
    return float(v.coords @ v.coords) / 2


def neighbor_gram(masses: MassProfile | Sequence[Scalar], i: int) -> float:
    """Closed form of ``(alpha_i, alpha_{i+1})`` for ``1 <= i <= n-1``."""
    m = _float_masses(masses, FLOAT)
    _check_index(i, len(m) - 2)
    left = 1.0 / np.sqrt(1 / m[i] + 1 / m[i - 1])
    right = 1.0 / np.sqrt(1 / m[i + 1] + 1 / m[i])
    return float(-(1 / m[i]) * left * right)


def basis_rank(g: GramData) -> int:
    """Numerical rank of ``{m, alpha_1, ..., alpha_n}``; equals ``n + 1`` for every positive mass profile."""
    return int(np.linalg.matrix_rank(np.vstack([g.m_vec, g.alpha])))


def identity_failures(g: GramData, numeric: Numeric = FLOAT) -> list[str]:
    """
    Checks the identities of the embedding within ``10 * tol`` and describes each one that fails.  An empty list
    means the Gram data is consistent.
    """
    failures = []
    for i in range(1, g.n + 1):
        a = g.alpha_at(i)
        if not numeric.close(float(np.linalg.norm(a)), 1.0):
            failures.append("|alpha_{i}| = {norm}".format(i=i, norm=float(np.linalg.norm(a))))
        if not numeric.close(float(a @ g.m_vec), 0.0):
            failures.append("(alpha_{i}, m) = {dot}".format(i=i, dot=float(a @ g.m_vec)))
        if not numeric.close(g.weight_at(i, i), -2.0):
            failures.append("k_{i}{i} = {k}".format(i=i, k=g.weight_at(i, i)))

        for j in range(1, g.n + 1):
            if g.weights[i - 1, j - 1] != g.weights[j - 1, i - 1]:
                failures.append("k_{i}{j} != k_{j}{i}".format(i=i, j=j))
            if abs(i - j) > 1 and not numeric.close(g.gram_at(i, j), 0.0):
                failures.append("(alpha_{i}, alpha_{j}) = {dot}".format(i=i, j=j, dot=g.gram_at(i, j)))

        if i < g.n:
            closed = neighbor_gram(g.masses, i)
            if not numeric.close(g.gram_at(i, i + 1), closed):
                failures.append(
                    "(alpha_{i}, alpha_{j}) = {dot}, closed form {closed}".format(
                        i=i, j=i + 1, dot=g.gram_at(i, i + 1), closed=closed
                    )
                )

    if basis_rank(g) != g.n + 1:
        failures.append("m, alpha_1..alpha_{n} do not span E^{dim}".format(n=g.n, dim=g.n + 1))

    for failure in failures:
        log.warning("Embedding identity failed: %s", failure)
    return failures
