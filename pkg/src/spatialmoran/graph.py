"""Weighted population graphs, stationary policies, and mutant configurations.

The population structure is a strongly connected digraph on ``n`` vertices
encoded by a row-stochastic weight matrix ``W``: entry ``W[v, u]`` is the
probability that vertex ``v`` places its offspring on vertex ``u``.
Self-loops are allowed.  Occupation states are bitmasks: bit ``v`` set means
vertex ``v + 1`` carries a mutant, so the all-ones mask is full fixation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    LevelOutOfRange,
    NotStochastic,
    NotStronglyConnected,
    NumericalFailure,
    TooLarge,
)

#: Default tolerance for stochasticity and stationarity checks.
STOCHASTIC_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Validated row-stochastic weight matrix of a strongly connected digraph.

    Construct through :func:`validate_weight_matrix`; the entry array is
    frozen (read-only) afterwards.
    """

    entries: np.ndarray

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self.entries.shape[0]

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Strictly positive probability row vector ``pi`` with ``pi @ W == pi``."""

    pi: np.ndarray

    @property
    def n(self) -> int:
        return self.pi.shape[0]


@dataclass(frozen=True, eq=False)
class SelectionPolicy:
    """Probability distribution over vertices used to pick the reproducing one."""

    mu: np.ndarray

    def __post_init__(self):
        mu = _frozen_array(self.mu)
        if mu.ndim != 1:
            raise NotStochastic("selection policy must be a vector")
        if np.any(mu < -STOCHASTIC_TOL) or abs(mu.sum() - 1.0) > STOCHASTIC_TOL:
            raise NotStochastic(
                f"selection policy must be a probability vector, got sum {float(mu.sum())!r}"
            )
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class Configuration:
    """Occupation state of the graph as a bitmask of ``n`` vertices.

    Bit ``v`` corresponds to vertex ``v + 1``; a set bit marks a mutant.
    """

    bits: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise LevelOutOfRange(f"vertex count must be positive, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise LevelOutOfRange(
                f"mask {self.bits:#b} does not fit into {self.n} bits"
            )

    @property
    def level(self) -> int:
        """Number of mutants (popcount of the mask)."""
        return self.bits.bit_count()

    @property
    def is_absorbing(self) -> bool:
        return self.bits == 0 or self.bits == (1 << self.n) - 1

    def vector(self) -> np.ndarray:
        """0/1 occupation row vector, component ``v`` for vertex ``v + 1``."""
        return mask_vector(self.bits, self.n)

    def complement(self) -> "Configuration":
        return Configuration(self.bits ^ ((1 << self.n) - 1), self.n)


def mask_vector(mask: int, n: int) -> np.ndarray:
    """Expand a bitmask into a float 0/1 vector of length ``n``."""
    return ((mask >> np.arange(n)) & 1).astype(float)


def validate_weight_matrix(raw, tol: float = STOCHASTIC_TOL,
                           max_exact_n: int | None = None) -> WeightMatrix:
    """Validate a raw square matrix as a population weight matrix.

    Checks shape, entry range, row stochasticity within ``tol``, and strong
    connectivity of the digraph spanned by positive off-diagonal entries
    (self-loops are ignored for connectivity).

    Parameters
    ----------
    raw : array_like, shape (n, n)
        Candidate weight matrix, ``n >= 2``.
    tol : float
        Row-sum tolerance.
    max_exact_n : int, optional
        When given, reject matrices with ``n > max_exact_n`` with
        :class:`TooLarge` (guard for downstream exact solvers).

    Returns
    -------
    WeightMatrix
    """
    entries = np.array(raw, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise NotStochastic(f"weight matrix must be square, got shape {entries.shape}")
    n = entries.shape[0]
    if n < 2:
        raise NotStochastic("population needs at least two vertices")
    if max_exact_n is not None and n > max_exact_n:
        raise TooLarge(f"n={n} exceeds the configured bound {max_exact_n}")
    if np.any(entries < -tol) or np.any(entries > 1.0 + tol):
        raise NotStochastic("entries must lie in [0, 1]")
    row_err = np.abs(entries.sum(axis=1) - 1.0)
    if np.any(row_err > tol):
        bad = int(np.argmax(row_err))
        raise NotStochastic(
            f"row {bad + 1} sums to {float(entries[bad].sum())!r}, off by {row_err[bad]:.3e}"
        )
    off_diag = entries.copy()
    np.fill_diagonal(off_diag, 0.0)
    adjacency = csr_matrix(off_diag > 0.0)
    n_comp, _ = connected_components(adjacency, directed=True, connection="strong")
    if n_comp != 1:
        raise NotStronglyConnected(
            f"positive off-diagonal edges split into {n_comp} strong components"
        )
    entries.setflags(write=False)
    return WeightMatrix(entries)


def stationary_distribution(W: WeightMatrix,
                            tol: float = STOCHASTIC_TOL) -> StationaryDistribution:
    """Compute the unique stationary distribution of a validated weight matrix.

    Solves ``pi @ W = pi`` together with ``sum(pi) = 1`` by replacing one
    balance equation with the normalisation row; strong connectivity makes the
    solution unique and strictly positive.  A least-squares solve of the full
    stacked system is used as fallback if the square system is ill-behaved.

    Raises
    ------
    NumericalFailure
        If the fixed-point residual ``max|pi @ W - pi|`` exceeds ``tol`` or a
        component is not strictly positive.
    """
    n = W.n
    A = W.entries.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi = None
    if pi is None or np.any(pi <= 0.0):
        stacked = np.vstack([W.entries.T - np.eye(n), np.ones((1, n))])
        rhs = np.zeros(n + 1)
        rhs[-1] = 1.0
        pi = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
    pi = pi / pi.sum()
    residual = np.max(np.abs(pi @ W.entries - pi))
    if residual > tol or np.any(pi <= 0.0):
        raise NumericalFailure(
            f"stationary solve failed: residual {residual:.3e}, min component {pi.min():.3e}"
        )
    return StationaryDistribution(_frozen_array(pi))


def is_isothermal(W: WeightMatrix, tol: float = STOCHASTIC_TOL) -> bool:
    """True iff every column of ``W`` sums to one (doubly stochastic weights)."""
    return bool(np.max(np.abs(W.column_sums() - 1.0)) <= tol)


def canonical_level(x: Configuration) -> int:
    """Number of mutants in a configuration (its level in the mutant-count partition)."""
    return x.level


def enumerate_level(n: int, j: int) -> list[Configuration]:
    """All configurations of ``n`` vertices with exactly ``j`` mutants.

    Returned in increasing bitmask order; there are ``C(n, j)`` of them.
    """
    if not 0 <= j <= n:
        raise LevelOutOfRange(f"level {j} outside [0, {n}]")
    masks = sorted(sum(1 << v for v in subset) for subset in combinations(range(n), j))
    return [Configuration(mask, n) for mask in masks]


def complete_graph_weights(n: int) -> WeightMatrix:
    """Complete graph with loops: every edge, including self-loops, has weight 1/n."""
    if n < 2:
        raise NotStochastic("population needs at least two vertices")
    return validate_weight_matrix(np.full((n, n), 1.0 / n))


def two_vertex_weights(w1: float, w2: float) -> WeightMatrix:
    """Two-vertex graph with cross weights ``w1`` (1 -> 2) and ``w2`` (2 -> 1).

    Both weights must lie in (0, 1]; the remaining mass sits on self-loops.
    """
    if not (0.0 < w1 <= 1.0 and 0.0 < w2 <= 1.0):
        raise NotStochastic(f"cross weights must lie in (0, 1], got {w1}, {w2}")
    return validate_weight_matrix([[1.0 - w1, w1], [w2, 1.0 - w2]])
