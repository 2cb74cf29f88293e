"""Structural diagnostics and small-population closed forms.

Covers the martingale drift identities under stationary selection, constancy
of the decrease/increase ratio, lumpability of the mutant-count projection,
the two-vertex fixation surface with its stationary and non-stationary
solution branches, and the three-vertex counterexample family whose neutral
fixation probability admits a rational closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import MicSMPModel, build_model, p_minus, p_plus
from .errors import (
    DegenerateCase,
    DegenerateDenominator,
    OutOfRange,
    ZeroDenominator,
)
from .exact import InitialDistribution, moran_rho
from .graph import (
    Configuration,
    SelectionPolicy,
    complete_graph_weights,
    enumerate_level,
    validate_weight_matrix,
)

#: Threshold for structural equality checks (exact float identities).
STRUCTURAL_TOL = 1e-12
#: Threshold for solver-mediated comparisons.
SOLVER_TOL = 1e-10

#: Three-vertex weight matrix whose stationary distribution is (2/7, 2/7, 3/7):
#: non-isothermal, yet single-mutant fixation can still match the well-mixed value.
GALANIS_WEIGHTS = ((0.0, 0.25, 0.75), (0.25, 0.0, 0.75), (0.5, 0.5, 0.0))


def _transient_pm(model: MicSMPModel):
    n = model.n
    for mask in range(1, (1 << n) - 1):
        x = Configuration(mask, n)
        yield mask, p_plus(x, model), p_minus(x, model)


@dataclass(frozen=True, eq=False)
class MartingaleReport:
    """Drift diagnostics per transient configuration.

    ``drift[mask] = p_plus - p_minus`` vanishes for stationary selection at
    neutral fitness; ``exp_drift[mask] = r p_minus + (1 - p_plus - p_minus)
    + p_plus / r - 1`` vanishes for stationary selection at every fitness.
    """

    drift: dict
    exp_drift: dict
    max_abs_drift: float
    max_abs_exp_drift: float


def martingale_report(model: MicSMPModel) -> MartingaleReport:
    """Evaluate both drift identities on every transient configuration."""
    r = model.r
    drift, exp_drift = {}, {}
    for mask, pp, pm in _transient_pm(model):
        drift[mask] = pp - pm
        exp_drift[mask] = r * pm + (1.0 - pp - pm) + pp / r - 1.0
    return MartingaleReport(
        drift=drift,
        exp_drift=exp_drift,
        max_abs_drift=max(abs(v) for v in drift.values()),
        max_abs_exp_drift=max(abs(v) for v in exp_drift.values()),
    )


def ratio_constancy(model: MicSMPModel) -> float:
    """Worst-case ``|p_minus / p_plus - 1/r|`` over transient configurations.

    Zero (to rounding) exactly when the selection policy is stationary for
    the weight matrix.  Configurations with ``p_plus == 0`` (possible only
    for policies with zero entries) contribute ``inf``.
    """
    worst = 0.0
    inv_r = 1.0 / model.r
    for _, pp, pm in _transient_pm(model):
        dev = abs(pm / pp - inv_r) if pp > 0.0 else float("inf")
        worst = max(worst, dev)
    return worst


def single_mutant_ratio_witness(model: MicSMPModel) -> tuple[int, float]:
    """Single-mutant configuration with the largest ratio deviation.

    Returns ``(mask, deviation)``; a strictly positive deviation witnesses a
    non-stationary policy, since for ``x = e_v`` the deviation numerator is
    ``mu_v - (mu W)_v``.
    """
    inv_r = 1.0 / model.r
    best = (0, -1.0)
    for v in range(model.n):
        x = Configuration(1 << v, model.n)
        pp = p_plus(x, model)
        dev = abs(p_minus(x, model) / pp - inv_r) if pp > 0.0 else float("inf")
        if dev > best[1]:
            best = (x.bits, dev)
    return best


@dataclass(frozen=True)
class MacroMarkovResult:
    """Whether the mutant-count projection is a Markov birth-death chain.

    ``lumpable`` requires ``p_plus`` and ``p_minus`` to be constant on every
    level; otherwise ``witness = (level, mask_a, mask_b)`` names two
    configurations of equal level with different transition probabilities.
    """

    lumpable: bool
    witness: tuple | None


def macro_markov_check(model: MicSMPModel, tol: float = STRUCTURAL_TOL) -> MacroMarkovResult:
    """Check per-level constancy of the increase/decrease probabilities."""
    n = model.n
    for level in range(1, n):
        configs = enumerate_level(n, level)
        ref = configs[0]
        ref_pp, ref_pm = p_plus(ref, model), p_minus(ref, model)
        for x in configs[1:]:
            if (abs(p_plus(x, model) - ref_pp) > tol
                    or abs(p_minus(x, model) - ref_pm) > tol):
                return MacroMarkovResult(False, (level, ref.bits, x.bits))
    return MacroMarkovResult(True, None)


# ---------------------------------------------------------------------------
# Two-vertex population: closed-form fixation surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class N2Params:
    """Parameters of the two-vertex model.

    ``a``
        Initial weight on the mutant-at-vertex-2 state (mask ``0b10``); the
        complementary weight ``1 - a`` sits on mask ``0b01``.
    ``m``
        Selection weight on vertex 1, so the policy is ``(m, 1 - m)``.
    ``c``
        Cross-weight ratio ``w1 / w2`` of the two-vertex graph.
    ``r``
        Mutant fitness.
    """

    a: float
    m: float
    c: float
    r: float

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise OutOfRange(f"initial weight a={self.a} outside [0, 1]")
        if not 0.0 <= self.m <= 1.0:
            raise OutOfRange(f"selection weight m={self.m} outside [0, 1]")
        if self.c <= 0.0 or self.r <= 0.0:
            raise OutOfRange(f"c and r must be positive, got c={self.c}, r={self.r}")

    def initial_distribution(self) -> InitialDistribution:
        atoms = []
        if self.a > 0.0:
            atoms.append((0b10, self.a))
        if self.a < 1.0:
            atoms.append((0b01, 1.0 - self.a))
        return InitialDistribution(n=2, atoms=tuple(atoms))

    def model(self, w2: float | None = None) -> MicSMPModel:
        """Concrete two-vertex model realising the ratio ``c = w1 / w2``."""
        from .graph import two_vertex_weights

        if w2 is None:
            w1 = min(1.0, self.c)
            w2 = w1 / self.c
        else:
            w1 = self.c * w2
        W = two_vertex_weights(w1, w2)
        return build_model(W, mu=np.array([self.m, 1.0 - self.m]), r=self.r)


def n2_fixation_closed_form(p: N2Params) -> float:
    """Fixation probability of the two-vertex model, in closed form.

    ``r a (1-m) / (m c + r (1-m)) + r m (1-a) / ((1-m)/c + r m)``.
    """
    d1 = p.m * p.c + p.r * (1.0 - p.m)
    d2 = (1.0 - p.m) / p.c + p.r * p.m
    if not (d1 > 0.0 and d2 > 0.0 and np.isfinite(d1) and np.isfinite(d2)):
        raise DegenerateDenominator(f"denominators {d1}, {d2} at m={p.m}, c={p.c}, r={p.r}")
    return p.r * p.a * (1.0 - p.m) / d1 + p.r * p.m * (1.0 - p.a) / d2


def n2_F(p: N2Params) -> float:
    """Fixation probability normalised by the single-mutant well-mixed value."""
    return n2_fixation_closed_form(p) / moran_rho(1, 2, p.r)


def n2_moran_selection(a: float, c: float, r: float) -> float:
    """Selection weight ``m`` making the two-vertex fixation match the
    well-mixed value at initial weight ``a``.

    ``m = (a (r+1) - r) / (a (r+1) (1-c) + c - r)`` for ``a`` inside the
    bracket ``[min(1, r), max(1, r)] / (r + 1)``.  At the neutral point
    ``a = 1/2, r = 1`` every ``m`` works and 0 is returned.

    Raises
    ------
    DegenerateCase
        If ``c == r == 1`` (the surface is flat only on the stationary line).
    OutOfRange
        If ``a`` is outside the bracket, or the resulting ``m`` escapes
        ``[0, 1]``.
    ZeroDenominator
        If the denominator vanishes away from the neutral point.
    """
    tol = STRUCTURAL_TOL
    if abs(c - 1.0) <= tol and abs(r - 1.0) <= tol:
        raise DegenerateCase("c and r simultaneously one")
    lo = min(1.0, r) / (r + 1.0)
    hi = max(1.0, r) / (r + 1.0)
    if not lo - tol <= a <= hi + tol:
        raise OutOfRange(f"a={a} outside the admissible bracket [{lo}, {hi}]")
    numerator = a * (r + 1.0) - r
    denominator = a * (r + 1.0) * (1.0 - c) + c - r
    if abs(denominator) <= 1e-14:
        if abs(numerator) <= 1e-14:
            return 0.0  # a = r/(r+1) with r = 1: every m matches
        raise ZeroDenominator(f"denominator vanishes at a={a}, c={c}, r={r}")
    m = numerator / denominator
    if not -tol <= m <= 1.0 + tol:
        raise OutOfRange(f"solved m={m} escapes [0, 1] at a={a}, c={c}, r={r}")
    return min(max(m, 0.0), 1.0)


def sweep_n2(c: float, r: float, grid: int) -> np.ndarray:
    """Normalised fixation surface on a uniform ``grid x grid`` lattice.

    Row index runs over the initial weight ``a``, column index over the
    selection weight ``m``, both on ``linspace(0, 1, grid)``.  Cells with a
    non-positive denominator are NaN.
    """
    if grid < 2:
        raise OutOfRange(f"grid must be at least 2, got {grid}")
    a = np.linspace(0.0, 1.0, grid)[:, None]
    m = np.linspace(0.0, 1.0, grid)[None, :]
    d1 = m * c + r * (1.0 - m)
    d2 = (1.0 - m) / c + r * m
    with np.errstate(divide="ignore", invalid="ignore"):
        value = r * a * (1.0 - m) / d1 + r * m * (1.0 - a) / d2
        value = np.where((d1 > 0.0) & (d2 > 0.0), value, np.nan)
    return value / moran_rho(1, 2, r)


# ---------------------------------------------------------------------------
# Three-vertex counterexample family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GalanisParams:
    """Neutral-fitness parameters for the three-vertex counterexample.

    The initial weights follow the closed form's state order: ``a1`` is the
    weight on the single-mutant state at vertex 2 (mask ``0b010``), ``a2``
    on vertex 3 (mask ``0b100``), and ``1 - a1 - a2`` on vertex 1 (mask
    ``0b001``).  ``m1``/``m2`` are the selection weights on vertices 1 and
    2, with ``1 - m1 - m2`` on vertex 3.
    """

    a1: float
    a2: float
    m1: float
    m2: float

    def __post_init__(self):
        if self.a1 < 0.0 or self.a2 < 0.0 or self.a1 + self.a2 > 1.0 + STRUCTURAL_TOL:
            raise OutOfRange(f"initial weights ({self.a1}, {self.a2}) not a sub-simplex point")
        if self.m1 < 0.0 or self.m2 < 0.0 or self.m1 + self.m2 > 1.0 + STRUCTURAL_TOL:
            raise OutOfRange(f"selection weights ({self.m1}, {self.m2}) not a sub-simplex point")

    def initial_distribution(self) -> InitialDistribution:
        weights = {0b010: self.a1, 0b100: self.a2, 0b001: 1.0 - self.a1 - self.a2}
        atoms = tuple((mask, w) for mask, w in weights.items() if w > 0.0)
        return InitialDistribution(n=3, atoms=atoms)

    def policy(self) -> SelectionPolicy:
        return SelectionPolicy(np.array([self.m1, self.m2, 1.0 - self.m1 - self.m2]))


def galanis_model(r: float, mu="stationary") -> MicSMPModel:
    """Three-vertex counterexample model; the policy defaults to stationary."""
    return build_model(validate_weight_matrix(GALANIS_WEIGHTS), mu=mu, r=r)


def galanis_neutral_fixation(g: GalanisParams) -> float:
    """Closed-form neutral fixation probability of the counterexample model.

    ``(2 a2 + 3 m1 - 3 a1 m1 + 3 a1 m2 - 5 a2 m1 - 2 a2 m2) / (m1 + m2 + 2)``;
    the denominator is at least 2.
    """
    numerator = (2.0 * g.a2 + 3.0 * g.m1 - 3.0 * g.a1 * g.m1 + 3.0 * g.a1 * g.m2
                 - 5.0 * g.a2 * g.m1 - 2.0 * g.a2 * g.m2)
    return numerator / (g.m1 + g.m2 + 2.0)


def galanis_case3_residual(g: GalanisParams) -> float:
    """Residual of the implicit neutral-fixation condition, defined for ``m1 != m2``.

    ``-a1 + a2 (2 - 5 m1 - 2 m2) / (3 (m1 - m2)) + (8 m1 - m2 - 2) / (9 (m1 - m2))``.
    """
    gap = g.m1 - g.m2
    if gap == 0.0:
        raise ZeroDenominator("implicit condition undefined at m1 == m2")
    return (-g.a1 + g.a2 * (2.0 - 5.0 * g.m1 - 2.0 * g.m2) / (3.0 * gap)
            + (8.0 * g.m1 - g.m2 - 2.0) / (9.0 * gap))


def galanis_case3_initial_weight(a2: float, m1: float, m2: float) -> float:
    """Solve the implicit condition for ``a1`` given ``(a2, m1, m2)``, ``m1 != m2``."""
    gap = m1 - m2
    if gap == 0.0:
        raise ZeroDenominator("implicit condition undefined at m1 == m2")
    return a2 * (2.0 - 5.0 * m1 - 2.0 * m2) / (3.0 * gap) + (8.0 * m1 - m2 - 2.0) / (9.0 * gap)


def galanis_moran_condition(g: GalanisParams,
                            tol: float = SOLVER_TOL) -> tuple[str | None, float]:
    """Classify whether the parameters force the well-mixed value 1/3.

    Returns ``(case, residual)`` with ``case`` one of ``"case1"`` (uniform
    initial weights, any policy), ``"case2"`` (``m1 = 2/7`` with
    ``a2 = (9 a1 - 1) / 6``), ``"case3"`` (the implicit condition holds with
    ``m1 != m2``), or ``None``.  The reported residual is the implicit
    condition's when defined, else the distance of the closed form from 1/3.
    """
    separated = abs(g.m1 - g.m2) > 1e-9
    residual = (galanis_case3_residual(g) if separated
                else galanis_neutral_fixation(g) - 1.0 / 3.0)
    if abs(g.a1 - 1.0 / 3.0) <= tol and abs(g.a2 - 1.0 / 3.0) <= tol:
        return "case1", residual
    if (abs(g.m1 - 2.0 / 7.0) <= tol and abs(g.a1 - 1.0 / 3.0) > tol
            and abs(g.a2 - (9.0 * g.a1 - 1.0) / 6.0) <= tol):
        return "case2", residual
    if separated and abs(residual) <= tol:
        return "case3", residual
    return None, residual


# ---------------------------------------------------------------------------
# Well-mixed reduction
# ---------------------------------------------------------------------------

def classic_p_plus(j: int, n: int, r: float) -> float:
    """Well-mixed probability of gaining a mutant from ``j`` of ``n``."""
    if not 0 < j < n:
        return 0.0
    frac = j / n
    return r / (1.0 + (r - 1.0) * frac) * frac * (n - j) / n


def classic_p_minus(j: int, n: int, r: float) -> float:
    """Well-mixed probability of losing a mutant from ``j`` of ``n``."""
    if not 0 < j < n:
        return 0.0
    frac = j / n
    return 1.0 / (1.0 + (r - 1.0) * frac) * frac * (n - j) / n


def classic_moran_check(n: int, r: float) -> float:
    """Largest deviation of the complete-graph model from the well-mixed law.

    Builds the complete graph with loops under uniform selection and compares
    ``p_plus``/``p_minus`` of every configuration against the classic
    ``j``-only formulas; the reduction is exact, so the result should sit at
    rounding level.
    """
    if not 2 <= n <= 12:
        raise OutOfRange(f"check supported for 2 <= n <= 12, got {n}")
    model = build_model(complete_graph_weights(n), mu="uniform", r=r)
    worst = 0.0
    for j in range(1, n):
        expected_pp = classic_p_plus(j, n, r)
        expected_pm = classic_p_minus(j, n, r)
        for x in enumerate_level(n, j):
            worst = max(worst, abs(p_plus(x, model) - expected_pp),
                        abs(p_minus(x, model) - expected_pm))
    return worst
