"""One-step law of the spatial Moran process on a weighted digraph.

Each update selects a parent vertex ``v`` (fitness-biased by the selection
policy) and copies its type onto a ``W(v, .)``-random neighbour ``v'``.
Copying onto a vertex that already carries the same type, including ``v``
itself, is an idle step.  The all-mutant and all-wildtype configurations are
absorbing.

For a configuration ``x``, policy ``mu`` and fitness ``r``, with
``zeta = x @ mu`` and ``W_mu = diag(mu) @ W``, the level transition
probabilities are::

    p_plus(x)  = r / (1 + (r - 1) zeta) * (x W_mu 1^T - x W_mu x^T)
    p_minus(x) = 1 / (1 + (r - 1) zeta) * ((1 - x) W_mu x^T)

Under stationary selection (``mu = pi`` with ``pi W = pi``) their ratio is
the constant ``p_minus / p_plus = 1 / r`` on every transient configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .errors import NotStochastic, TooLarge
from .graph import (
    STOCHASTIC_TOL,
    Configuration,
    SelectionPolicy,
    WeightMatrix,
    mask_vector,
    stationary_distribution,
)

#: Largest vertex count for dense kernel storage (2^n x 2^n matrix).
DENSE_KERNEL_LIMIT = 12
#: Largest vertex count for which a kernel is assembled at all.
MAX_KERNEL_VERTICES = 20


@dataclass(frozen=True, eq=False)
class MicSMPModel:
    """A spatial Moran process: weights ``W``, selection policy ``mu``, fitness ``r``."""

    W: WeightMatrix
    mu: SelectionPolicy
    r: float
    #: diag(mu) @ W, precomputed once (derived, read-only).
    w_mu: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.r <= 0.0 or not np.isfinite(self.r):
            raise NotStochastic(f"fitness must be positive and finite, got {self.r}")
        if self.mu.n != self.W.n:
            raise NotStochastic(
                f"policy length {self.mu.n} does not match vertex count {self.W.n}"
            )
        w_mu = self.mu.mu[:, None] * self.W.entries
        w_mu.setflags(write=False)
        object.__setattr__(self, "w_mu", w_mu)

    @property
    def n(self) -> int:
        return self.W.n

    def stationarity_gap(self) -> float:
        """``max|mu @ W - mu|``; zero iff the policy is stationary for ``W``."""
        return float(np.max(np.abs(self.mu.mu @ self.W.entries - self.mu.mu)))

    def is_stationary(self, tol: float = STOCHASTIC_TOL) -> bool:
        return self.stationarity_gap() <= tol


def build_model(W: WeightMatrix, mu="stationary", r: float = 1.0) -> MicSMPModel:
    """Assemble a model, resolving the policy specification.

    ``mu`` may be a :class:`SelectionPolicy`, a vector, the string
    ``"stationary"`` (use the stationary distribution of ``W``) or
    ``"uniform"``.
    """
    if isinstance(mu, str):
        if mu == "stationary":
            mu = SelectionPolicy(stationary_distribution(W).pi)
        elif mu == "uniform":
            mu = SelectionPolicy(np.full(W.n, 1.0 / W.n))
        else:
            raise NotStochastic(f"unknown policy specification {mu!r}")
    elif not isinstance(mu, SelectionPolicy):
        mu = SelectionPolicy(np.asarray(mu, dtype=float))
    return MicSMPModel(W=W, mu=mu, r=float(r))


@dataclass(frozen=True, eq=False)
class StepDistribution:
    """One-step law out of a configuration: changing moves plus an idle mass."""

    source: Configuration
    transitions: tuple  # ((Configuration, probability), ...) sorted by target mask
    idle_probability: float

    def total(self) -> float:
        return self.idle_probability + sum(p for _, p in self.transitions)


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Row-stochastic kernel over all ``2^n`` configurations, indexed by bitmask.

    ``P`` is a dense ndarray for small populations and a CSR matrix above
    :data:`DENSE_KERNEL_LIMIT`.  Rows 0 and ``2^n - 1`` are exact unit
    self-loops.
    """

    n: int
    P: object

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def is_dense(self) -> bool:
        return isinstance(self.P, np.ndarray)

    def row(self, mask: int) -> np.ndarray:
        if self.is_dense:
            return self.P[mask]
        return np.asarray(self.P.getrow(mask).todense()).ravel()

    def entries(self):
        """Yield ``(from_mask, to_mask, probability)`` for every nonzero entry."""
        if self.is_dense:
            rows, cols = np.nonzero(self.P)
            for i, j in zip(rows.tolist(), cols.tolist()):
                yield i, j, float(self.P[i, j])
        else:
            coo = self.P.tocoo()
            order = np.lexsort((coo.col, coo.row))
            for k in order.tolist():
                yield int(coo.row[k]), int(coo.col[k]), float(coo.data[k])


def zeta(x: Configuration, mu: SelectionPolicy) -> float:
    """Probability that the selected parent is a mutant, before fitness bias."""
    if x.n != mu.n:
        raise NotStochastic("configuration and policy dimensions differ")
    return float(x.vector() @ mu.mu)


def p_plus(x: Configuration, model: MicSMPModel) -> float:
    """Probability that one update increases the mutant count by one."""
    xv = _vector_for(x, model)
    z = float(xv @ model.mu.mu)
    row = xv @ model.w_mu
    return float(model.r / (1.0 + (model.r - 1.0) * z) * (row.sum() - row @ xv))


def p_minus(x: Configuration, model: MicSMPModel) -> float:
    """Probability that one update decreases the mutant count by one."""
    xv = _vector_for(x, model)
    z = float(xv @ model.mu.mu)
    return float(((1.0 - xv) @ model.w_mu @ xv) / (1.0 + (model.r - 1.0) * z))


def _vector_for(x: Configuration, model: MicSMPModel) -> np.ndarray:
    if x.n != model.n:
        raise NotStochastic("configuration and model dimensions differ")
    return x.vector()


def _row_changes(mask: int, n: int, W: np.ndarray, mu: np.ndarray, r: float):
    """Per-vertex flip masses out of ``mask``.

    Returns ``(gain, loss, idle)`` where ``gain[u]`` is the mass copying a
    mutant onto vertex ``u + 1`` (only meaningful where bit ``u`` is clear)
    and ``loss[u]`` the mass copying a wildtype onto it (bit set).  ``idle``
    collects all same-type replacements.
    """
    x = mask_vector(mask, n)
    z = x @ mu
    sel = mu * np.where(x > 0.0, r, 1.0) / (1.0 + (r - 1.0) * z)
    toward = (sel * x) @ W
    away = (sel * (1.0 - x)) @ W
    gain = toward * (1.0 - x)
    loss = away * x
    idle = float(toward @ x + away @ (1.0 - x))
    return gain, loss, idle


def step_distribution(x: Configuration, model: MicSMPModel) -> StepDistribution:
    """Aggregate the one-step law out of ``x`` over all ordered parent/target pairs."""
    xv = _vector_for(x, model)  # dimension check
    del xv
    n = model.n
    gain, loss, idle = _row_changes(x.bits, n, model.W.entries, model.mu.mu, model.r)
    moves = []
    for u in range(n):
        p = gain[u] + loss[u]  # disjoint: one of them is zero at every u
        if p > 0.0:
            moves.append((Configuration(x.bits ^ (1 << u), n), float(p)))
    moves.sort(key=lambda pair: pair[0].bits)
    return StepDistribution(source=x, transitions=tuple(moves), idle_probability=idle)


def transition_kernel(model: MicSMPModel,
                      dense_limit: int = DENSE_KERNEL_LIMIT,
                      max_vertices: int = MAX_KERNEL_VERTICES) -> TransitionKernel:
    """Assemble the full ``2^n x 2^n`` transition kernel row by row.

    Rows are produced in ascending mask order from the same per-row
    aggregation as :func:`step_distribution`, so kernel rows and step laws
    agree bitwise.  Raises :class:`TooLarge` above ``max_vertices``.
    """
    n = model.n
    if n > max_vertices:
        raise TooLarge(f"kernel for n={n} exceeds the bound {max_vertices}")
    size = 1 << n
    full = size - 1
    W, mu, r = model.W.entries, model.mu.mu, model.r
    flips = 1 << np.arange(n)

    if n <= dense_limit:
        P = np.zeros((size, size))
        for mask in range(1, full):
            gain, loss, idle = _row_changes(mask, n, W, mu, r)
            P[mask, mask ^ flips] = gain + loss
            P[mask, mask] = idle
        P[0, 0] = 1.0
        P[full, full] = 1.0
        return TransitionKernel(n=n, P=P)

    rows, cols, vals = [], [], []
    for mask in range(1, full):
        gain, loss, idle = _row_changes(mask, n, W, mu, r)
        masses = gain + loss
        nz = np.nonzero(masses)[0]
        rows.extend([mask] * (len(nz) + 1))
        cols.extend((mask ^ flips[nz]).tolist())
        vals.extend(masses[nz].tolist())
        cols.append(mask)
        vals.append(idle)
    rows.extend([0, full])
    cols.extend([0, full])
    vals.extend([1.0, 1.0])
    P = csr_matrix((vals, (rows, cols)), shape=(size, size))
    return TransitionKernel(n=n, P=P)
