"""Seeded random weight-matrix families for verification suites."""

from __future__ import annotations

import numpy as np

from .errors import NumericalFailure
from .graph import STOCHASTIC_TOL, WeightMatrix, validate_weight_matrix


def random_strongly_connected_weights(n: int, rng: np.random.Generator,
                                      density: float = 0.5) -> WeightMatrix:
    """Random row-stochastic weights whose positive edges are strongly connected.

    Off-diagonal edges appear with probability ``density``; a directed cycle
    through all vertices is always present, which guarantees strong
    connectivity.  Self-loops are kept with the same density.
    """
    mass = rng.uniform(0.2, 1.0, (n, n))
    keep = rng.random((n, n)) < density
    weights = np.where(keep, mass, 0.0)
    for v in range(n):
        weights[v, (v + 1) % n] = rng.uniform(0.2, 1.0)
    weights /= weights.sum(axis=1, keepdims=True)
    return validate_weight_matrix(weights)


def random_doubly_stochastic(n: int, rng: np.random.Generator,
                             iterations: int = 500,
                             tol: float = STOCHASTIC_TOL) -> WeightMatrix:
    """Random doubly stochastic weights by alternating row/column normalisation.

    Starts from a strictly positive random matrix, so the normalisation
    converges geometrically and the result is strongly connected.  The final
    pass normalises rows exactly; a residual column-sum error above ``tol``
    raises :class:`NumericalFailure`.
    """
    mass = rng.uniform(0.1, 1.0, (n, n))
    for _ in range(iterations):
        mass /= mass.sum(axis=1, keepdims=True)
        mass /= mass.sum(axis=0, keepdims=True)
    mass /= mass.sum(axis=1, keepdims=True)
    column_error = float(np.max(np.abs(mass.sum(axis=0) - 1.0)))
    if column_error > tol:
        raise NumericalFailure(
            f"column sums off by {column_error:.3e} after {iterations} iterations"
        )
    return validate_weight_matrix(mass)
