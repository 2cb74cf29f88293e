"""The three-vertex counterexample: well-mixed fixation without stationarity.

The weight matrix [[0, 1/4, 3/4], [1/4, 0, 3/4], [1/2, 1/2, 0]] is not
doubly stochastic and its mutant-count projection is not Markov, yet at
neutral fitness whole families of (initial distribution, selection policy)
pairs still fix with probability exactly 1/3.  The neutral fixation
probability has a rational closed form in the initial weights (a1, a2,
ordered: mutant at vertex 2, vertex 3, vertex 1) and policy weights
(m1, m2) on vertices 1 and 2.
"""

import numpy as np

from spatialmoran import (
    Configuration,
    GalanisParams,
    fixation_for_initial,
    galanis_case3_initial_weight,
    galanis_model,
    galanis_moran_condition,
    galanis_neutral_fixation,
    macro_markov_check,
    p_plus,
    stationary_distribution,
)

model = galanis_model(1.0)
print("stationary distribution:", np.round(stationary_distribution(model.W).pi, 6))

result = macro_markov_check(model)
level, mask_a, mask_b = result.witness
print(f"mutant-count projection Markov? {result.lumpable};"
      f" witness at level {level}: gain rate {p_plus(Configuration(mask_a, 3), model):.4f}"
      f" from mask {mask_a:#05b} vs {p_plus(Configuration(mask_b, 3), model):.4f}"
      f" from mask {mask_b:#05b}")
print()

print("closed form vs exact solver at random neutral parameters:")
rng = np.random.default_rng(3)
for _ in range(4):
    a = rng.dirichlet(np.ones(3))
    m = rng.dirichlet(np.ones(3))
    g = GalanisParams(a1=float(a[0]), a2=float(a[1]), m1=float(m[0]), m2=float(m[1]))
    closed = galanis_neutral_fixation(g)
    exact = fixation_for_initial(galanis_model(1.0, mu=g.policy()), g.initial_distribution())
    print(f"  a=({g.a1:.3f},{g.a2:.3f}) m=({g.m1:.3f},{g.m2:.3f}):"
          f" closed {closed:.10f} exact {exact:.10f} diff {abs(closed - exact):.1e}")
print()

print("three families that force the well-mixed value 1/3:")
demos = []
m = rng.dirichlet(np.ones(3))
demos.append(GalanisParams(a1=1 / 3, a2=1 / 3, m1=float(m[0]), m2=float(m[1])))
a1 = 0.25
demos.append(GalanisParams(a1=a1, a2=(9 * a1 - 1) / 6, m1=2 / 7, m2=0.4))
a1 = galanis_case3_initial_weight(0.3, 0.55, 0.15)
demos.append(GalanisParams(a1=a1, a2=0.3, m1=0.55, m2=0.15))
for g in demos:
    case, residual = galanis_moran_condition(g)
    print(f"  {case}: a=({g.a1:.4f},{g.a2:.4f}) m=({g.m1:.4f},{g.m2:.4f})"
          f" -> fixation {galanis_neutral_fixation(g):.12f} (residual {residual:+.1e})")
print()
g = GalanisParams(a1=0.6, a2=0.1, m1=0.5, m2=0.2)
case, residual = galanis_moran_condition(g)
print(f"generic parameters classify as {case!r}:"
      f" fixation {galanis_neutral_fixation(g):.6f} != 1/3 (residual {residual:+.3f})")
