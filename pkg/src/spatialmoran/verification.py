"""Bundled verification checks behind the ``verify`` command.

The builtin suite exercises every structural identity on seeded random model
families; each check reports a pass flag, its worst deviation, and a witness
where one exists.  For a user-supplied model the same quantities are
reported descriptively without pass/fail semantics.
"""

from __future__ import annotations

import numpy as np

from .analysis import (
    GalanisParams,
    N2Params,
    classic_moran_check,
    galanis_case3_initial_weight,
    galanis_model,
    galanis_moran_condition,
    galanis_neutral_fixation,
    macro_markov_check,
    martingale_report,
    n2_F,
    n2_fixation_closed_form,
    n2_moran_selection,
    ratio_constancy,
    single_mutant_ratio_witness,
)
from .dynamics import MicSMPModel, build_model
from .errors import OutOfRange, SpatialMoranError, ZeroDenominator
from .exact import fixation_for_initial, fixation_probabilities, moran_rho
from .generators import random_doubly_stochastic, random_strongly_connected_weights
from .graph import complete_graph_weights, is_isothermal, stationary_distribution

DEFAULT_SEED = 20260811
_R_SET = (0.5, 1.0, 2.0)


def _check(max_deviation: float, threshold: float, witness=None) -> dict:
    result = {"pass": bool(max_deviation <= threshold),
              "max_deviation": float(max_deviation), "threshold": threshold}
    if witness is not None:
        result["witness"] = witness
    return result


def _stationary_and_isothermal(rng, graphs: int):
    residual = 0.0
    fixation_dev = 0.0
    iso_dev = 0.0
    for k in range(graphs):
        n = int(rng.integers(3, 9))
        W = random_strongly_connected_weights(n, rng)
        pi = stationary_distribution(W)
        residual = max(residual, float(np.max(np.abs(pi.pi @ W.entries - pi.pi))))
        for r in _R_SET:
            report = fixation_probabilities(build_model(W, mu=pi.pi, r=r))
            fixation_dev = max(fixation_dev, max(report.per_level_deviation.values()))
        D = random_doubly_stochastic(n, rng)
        if not is_isothermal(D):
            iso_dev = float("inf")
        for r in _R_SET:
            report = fixation_probabilities(build_model(D, mu="uniform", r=r))
            iso_dev = max(iso_dev, max(report.per_level_deviation.values()))
    return residual, fixation_dev, iso_dev


def _martingale_and_ratio(rng, graphs: int):
    drift_dev = 0.0
    exp_dev = 0.0
    ratio_dev = 0.0
    witness_floor = float("inf")
    witness = None
    for _ in range(graphs):
        n = int(rng.integers(3, 9))
        W = random_strongly_connected_weights(n, rng)
        pi = stationary_distribution(W).pi
        drift_dev = max(drift_dev, martingale_report(build_model(W, mu=pi, r=1.0)).max_abs_drift)
        for r in (0.25, 0.5, 2.0, 4.0):
            model = build_model(W, mu=pi, r=r)
            exp_dev = max(exp_dev, martingale_report(model).max_abs_exp_drift)
            ratio_dev = max(ratio_dev, ratio_constancy(model))
        # strictly positive non-stationary policy must leave a witness
        mu = pi * rng.uniform(0.5, 2.0, n)
        mu /= mu.sum()
        if np.max(np.abs(mu @ W.entries - mu)) > 1e-3:
            mask, dev = single_mutant_ratio_witness(build_model(W, mu=mu, r=2.0))
            if dev < witness_floor:
                witness_floor = dev
                witness = {"mask": mask, "deviation": dev}
    return drift_dev, exp_dev, ratio_dev, witness_floor, witness


def _n2_suite(rng) -> float:
    worst = 0.0
    grid = np.linspace(0.0, 1.0, 11)
    for c in (0.5, 1.0, 2.0):
        for r in (0.5, 1.0, 2.0):
            for a in grid:
                for m in grid:
                    p = N2Params(a=float(a), m=float(m), c=c, r=r)
                    exact = fixation_for_initial(p.model(), p.initial_distribution())
                    worst = max(worst, abs(n2_fixation_closed_form(p) - exact))
    found = 0
    while found < 50:
        r = float(rng.uniform(0.25, 4.0))
        if abs(r - 1.0) < 0.05:
            continue
        c = float(rng.uniform(0.25, 4.0))
        lo, hi = min(1.0, r) / (r + 1.0), max(1.0, r) / (r + 1.0)
        a = float(rng.uniform(lo, hi))
        try:
            m = n2_moran_selection(a, c, r)
        except (OutOfRange, ZeroDenominator):
            continue
        worst = max(worst, abs(n2_F(N2Params(a=a, m=m, c=c, r=r)) - 1.0))
        found += 1
    return worst


def _galanis_suite(rng) -> float:
    pi = stationary_distribution(galanis_model(1.0).W).pi
    worst = float(np.max(np.abs(pi - np.array([2.0 / 7.0, 2.0 / 7.0, 3.0 / 7.0]))))
    for _ in range(50):
        a1, a2 = rng.dirichlet(np.ones(3))[:2]
        m1, m2 = rng.dirichlet(np.ones(3))[:2]
        g = GalanisParams(a1=a1, a2=a2, m1=m1, m2=m2)
        exact = fixation_for_initial(galanis_model(1.0, mu=g.policy()),
                                     g.initial_distribution())
        worst = max(worst, abs(galanis_neutral_fixation(g) - exact))
    for _ in range(10):
        # one sample from each forced-value family
        m = rng.dirichlet(np.ones(3))
        g1 = GalanisParams(a1=1.0 / 3.0, a2=1.0 / 3.0, m1=m[0], m2=m[1])
        a1 = float(rng.uniform(1.0 / 9.0, 7.0 / 15.0))
        g2 = GalanisParams(a1=a1, a2=(9.0 * a1 - 1.0) / 6.0, m1=2.0 / 7.0,
                           m2=float(rng.uniform(0.0, 5.0 / 7.0)))
        g3 = None
        while g3 is None:
            m1, m2 = rng.dirichlet(np.ones(3))[:2]
            if abs(m1 - m2) < 1e-2:
                continue
            a2 = float(rng.uniform(0.0, 1.0))
            a1 = galanis_case3_initial_weight(a2, m1, m2)
            if 0.0 <= a1 and a1 + a2 <= 1.0:
                g3 = GalanisParams(a1=a1, a2=a2, m1=m1, m2=m2)
        for g, case in ((g1, "case1"), (g2, "case2"), (g3, "case3")):
            worst = max(worst, abs(galanis_neutral_fixation(g) - 1.0 / 3.0))
            if galanis_moran_condition(g)[0] != case:
                worst = float("inf")
    return worst


def builtin_suite(seed: int = DEFAULT_SEED, graphs: int = 10) -> dict:
    """Run every bundled check on seeded random families.

    Returns ``{check_name: {"pass": bool, "max_deviation": float, ...}}``.
    """
    rng = np.random.default_rng(seed)
    checks: dict[str, dict] = {}

    residual, stationary_dev, iso_dev = _stationary_and_isothermal(rng, graphs)
    checks["stochasticity_stationarity"] = _check(residual, 1e-12)
    checks["stationary_selection_fixation"] = _check(stationary_dev, 1e-9)
    checks["isothermal_fixation"] = _check(iso_dev, 1e-9)

    drift_dev, exp_dev, ratio_dev, witness_floor, witness = _martingale_and_ratio(rng, graphs)
    checks["martingale_drift"] = _check(drift_dev, 1e-12)
    checks["martingale_exponential"] = _check(exp_dev, 1e-12)
    checks["ratio_constancy_stationary"] = _check(ratio_dev, 1e-12)
    checks["ratio_deviation_witness"] = {
        "pass": bool(witness_floor > 1e-9), "max_deviation": float(witness_floor),
        "threshold": 1e-9, "witness": witness,
    }

    classic_dev = max(classic_moran_check(n, r) for n in range(2, 9) for r in _R_SET)
    checks["classic_reduction"] = _check(classic_dev, 1e-12)

    complete_ok = all(macro_markov_check(build_model(complete_graph_weights(n),
                                                     mu="uniform", r=2.0)).lumpable
                      for n in range(2, 7))
    galanis_result = macro_markov_check(galanis_model(1.0))
    checks["macro_markov"] = {
        "pass": bool(complete_ok and not galanis_result.lumpable
                     and galanis_result.witness[0] == 1),
        "max_deviation": 0.0 if complete_ok else float("inf"),
        "threshold": 0.0,
        "witness": galanis_result.witness,
    }

    checks["n2_closed_form"] = _check(_n2_suite(rng), 1e-10)
    checks["galanis_closed_form"] = _check(_galanis_suite(rng), 1e-10)
    return checks


def describe_model(model: MicSMPModel) -> dict:
    """Descriptive diagnostics for a user-supplied model (no pass/fail)."""
    report = martingale_report(model)
    macro = macro_markov_check(model)
    mask, dev = single_mutant_ratio_witness(model)
    out = {
        "n": model.n,
        "r": model.r,
        "policy_stationarity_gap": model.stationarity_gap(),
        "policy_is_stationary": model.is_stationary(1e-9),
        "isothermal": is_isothermal(model.W),
        "ratio_constancy": ratio_constancy(model),
        "single_mutant_ratio_witness": {"mask": mask, "deviation": dev},
        "max_abs_drift": report.max_abs_drift,
        "max_abs_exp_drift": report.max_abs_exp_drift,
        "macro_markov": {"lumpable": macro.lumpable, "witness": macro.witness},
    }
    try:
        fix = fixation_probabilities(model)
        out["moran_deviation"] = {str(k): v for k, v in fix.per_level_deviation.items()}
        out["moran_reference"] = {str(j): moran_rho(j, model.n, model.r)
                                  for j in range(1, model.n)}
    except SpatialMoranError as exc:
        out["moran_deviation_error"] = f"{type(exc).__name__}: {exc}"
    return out
