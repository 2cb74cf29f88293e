"""Exact fixation probabilities via the absorbing-chain linear system.

For transient states ``t`` the fixation probabilities solve
``(I - Q) h = b`` where ``Q`` is the transient sub-kernel and ``b`` the
one-step masses into the all-mutant state.  The reference values are the
classic well-mixed fixation probabilities ``rho_i = i/n`` for neutral
fitness and ``(1 - r^-i) / (1 - r^-n)`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import MicSMPModel, TransitionKernel, transition_kernel
from .errors import AtomOnAbsorbing, NoConvergence, NotStochastic, NumericalFailure, TooLarge
from .graph import STOCHASTIC_TOL, Configuration

#: Largest vertex count for the dense LU solve.
DENSE_SOLVE_LIMIT = 12
#: Largest vertex count for the fixed-point solve on the sparse kernel.
ITERATIVE_SOLVE_LIMIT = 20
#: Required residual of the solved linear system, max-norm.
SOLVE_RESIDUAL_TOL = 1e-10

_NEUTRAL_TOL = 1e-12


def moran_rho(i: int, n: int, r: float) -> float:
    """Classic well-mixed fixation probability from ``i`` mutants among ``n``.

    Neutral fitness (``|r - 1| <= 1e-12``) gives ``i / n``; otherwise
    ``(1 - r^-i) / (1 - r^-n)``, evaluated through ``expm1``/``log1p`` so the
    near-neutral regime does not cancel catastrophically.
    """
    if not 0 <= i <= n:
        raise NotStochastic(f"mutant count {i} outside [0, {n}]")
    if i == 0:
        return 0.0
    if i == n:
        return 1.0
    if abs(r - 1.0) <= _NEUTRAL_TOL:
        return i / n
    log_r = math.log1p(r - 1.0)
    return math.expm1(-i * log_r) / math.expm1(-n * log_r)


@dataclass(frozen=True)
class InitialDistribution:
    """Probability atoms over transient configurations, ``((mask, weight), ...)``."""

    n: int
    atoms: tuple

    def __post_init__(self):
        full = (1 << self.n) - 1
        cleaned = []
        total = 0.0
        for mask, weight in self.atoms:
            mask = mask.bits if isinstance(mask, Configuration) else int(mask)
            weight = float(weight)
            if not 0 <= mask <= full:
                raise NotStochastic(f"mask {mask:#b} does not fit into {self.n} bits")
            if weight < -STOCHASTIC_TOL:
                raise NotStochastic(f"negative weight {weight} on mask {mask:#b}")
            if weight == 0.0:
                continue
            if mask == 0 or mask == full:
                raise AtomOnAbsorbing(f"initial atom on absorbing mask {mask:#b}")
            cleaned.append((mask, weight))
            total += weight
        if abs(total - 1.0) > STOCHASTIC_TOL:
            raise NotStochastic(f"initial weights sum to {total!r}, expected 1")
        object.__setattr__(self, "atoms", tuple(cleaned))

    @classmethod
    def point_mass(cls, mask: int, n: int) -> "InitialDistribution":
        return cls(n=n, atoms=((mask, 1.0),))

    @classmethod
    def level_uniform(cls, n: int, j: int) -> "InitialDistribution":
        from .graph import enumerate_level

        configs = enumerate_level(n, j)
        return cls(n=n, atoms=tuple((c.bits, 1.0 / len(configs)) for c in configs))


@dataclass(frozen=True)
class SolverInfo:
    """How a fixation system was solved: method, sweep count, final residual."""

    method: str
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class FixationReport:
    """Fixation probabilities per configuration plus well-mixed reference deviations.

    ``rho`` maps every bitmask to its fixation probability (0 at the empty
    mask, 1 at the full mask).  ``per_level_deviation[j]`` is the largest
    ``|rho_x - rho_j(reference)|`` over configurations with ``j`` mutants.
    """

    n: int
    r: float
    rho: dict
    per_level_deviation: dict
    solver: SolverInfo
    rho_alpha: float | None = None


def _solve_dense(P: np.ndarray, size: int) -> tuple[np.ndarray, SolverInfo]:
    Q = P[1:size - 1, 1:size - 1]
    b = P[1:size - 1, size - 1]
    A = np.eye(size - 2) - Q
    h = scipy.linalg.solve(A, b)
    residual = float(np.max(np.abs(A @ h - b)))
    return h, SolverInfo(method="dense", iterations=1, residual=residual)


def _solve_iterative(kernel: TransitionKernel, size: int,
                     tol: float = 1e-12, max_sweeps: int = 10**7):
    P = kernel.P
    if kernel.is_dense:
        Q = P[1:size - 1, 1:size - 1]
        b = P[1:size - 1, size - 1]
    else:
        Q = P[1:size - 1, 1:size - 1].tocsr()
        b = np.asarray(P[1:size - 1, size - 1].todense()).ravel()
    h = b.copy()
    for sweep in range(1, max_sweeps + 1):
        h_next = Q @ h + b
        delta = float(np.max(np.abs(h_next - h)))
        h = h_next
        if delta <= tol:
            residual = float(np.max(np.abs(h - (Q @ h + b))))
            return h, SolverInfo(method="iterative", iterations=sweep, residual=residual)
    raise NoConvergence(f"fixed-point solve did not converge in {max_sweeps} sweeps")


def fixation_probabilities(model: MicSMPModel, method: str = "auto",
                           alpha: InitialDistribution | None = None) -> FixationReport:
    """Solve the absorbing chain for every configuration's fixation probability.

    Parameters
    ----------
    model : MicSMPModel
    method : {"auto", "dense", "iterative"}
        ``auto`` picks the dense LU solve up to ``n = 12`` and the
        substochastic fixed-point iteration beyond.
    alpha : InitialDistribution, optional
        When given, the report carries ``rho_alpha = sum alpha(x) rho_x``.

    Raises
    ------
    TooLarge
        If ``n`` exceeds the limit of the requested method.
    NumericalFailure
        If the solved system's residual exceeds 1e-10.
    """
    n = model.n
    if method == "auto":
        method = "dense" if n <= DENSE_SOLVE_LIMIT else "iterative"
    if method == "dense" and n > DENSE_SOLVE_LIMIT:
        raise TooLarge(f"dense solve limited to n <= {DENSE_SOLVE_LIMIT}, got {n}")
    if n > ITERATIVE_SOLVE_LIMIT:
        raise TooLarge(f"solvers limited to n <= {ITERATIVE_SOLVE_LIMIT}, got {n}")

    kernel = transition_kernel(model)
    size = 1 << n
    if method == "dense":
        P = kernel.P if kernel.is_dense else np.asarray(kernel.P.todense())
        h, info = _solve_dense(P, size)
    elif method == "iterative":
        h, info = _solve_iterative(kernel, size)
    else:
        raise NotStochastic(f"unknown solver method {method!r}")

    if info.residual > SOLVE_RESIDUAL_TOL:
        raise NumericalFailure(f"solver residual {info.residual:.3e} above 1e-10")
    if np.any(h < -SOLVE_RESIDUAL_TOL) or np.any(h > 1.0 + SOLVE_RESIDUAL_TOL):
        raise NumericalFailure("fixation probabilities escape [0, 1]")
    h = np.clip(h, 0.0, 1.0)

    rho = {0: 0.0, size - 1: 1.0}
    for mask in range(1, size - 1):
        rho[mask] = float(h[mask - 1])

    deviation: dict[int, float] = {}
    for mask in range(1, size - 1):
        level = mask.bit_count()
        dev = abs(rho[mask] - moran_rho(level, n, model.r))
        deviation[level] = max(deviation.get(level, 0.0), dev)

    rho_alpha = None
    if alpha is not None:
        if alpha.n != n:
            raise NotStochastic("initial distribution dimension mismatch")
        rho_alpha = float(sum(w * rho[mask] for mask, w in alpha.atoms))

    return FixationReport(n=n, r=model.r, rho=rho, per_level_deviation=deviation,
                          solver=info, rho_alpha=rho_alpha)


def fixation_for_initial(model: MicSMPModel, alpha: InitialDistribution) -> float:
    """Fixation probability when the start is drawn from ``alpha``."""
    return fixation_probabilities(model, alpha=alpha).rho_alpha


def moran_deviation(model: MicSMPModel, method: str = "auto") -> dict:
    """Per-level worst-case distance of ``rho_x`` from the well-mixed reference."""
    return fixation_probabilities(model, method=method).per_level_deviation
