"""The two-vertex fixation surface and its unit isolines.

For two vertices everything is explicit: the fixation probability is a
rational function of the initial weight a, the selection weight m, the
cross-weight ratio c, and the fitness r.  Normalising by the well-mixed
single-mutant value r/(r+1) gives a surface F(m, a | c, r) whose F = 1 set
contains two branches: the stationary vertical line m = 1/(c+1), and a
curve m(a) available when c and r are not both one.
"""

import numpy as np

from spatialmoran import (
    N2Params,
    fixation_for_initial,
    n2_F,
    n2_fixation_closed_form,
    n2_moran_selection,
    sweep_n2,
)

c, r = 2.0, 3.0
print(f"c = {c}, r = {r}; well-mixed single-mutant value r/(r+1) = {r / (r + 1):.6f}")
print()

print("closed form vs exact solver at random parameters:")
rng = np.random.default_rng(11)
for _ in range(4):
    p = N2Params(a=float(rng.uniform(0, 1)), m=float(rng.uniform(0, 1)), c=c, r=r)
    closed = n2_fixation_closed_form(p)
    exact = fixation_for_initial(p.model(), p.initial_distribution())
    print(f"  a={p.a:.3f} m={p.m:.3f}: closed {closed:.12f}  exact {exact:.12f}"
          f"  diff {abs(closed - exact):.1e}")
print()

print("stationary branch: m = 1/(c+1) gives F = 1 for every initial weight")
for a in (0.0, 0.25, 0.75, 1.0):
    p = N2Params(a=a, m=1 / (c + 1), c=c, r=r)
    print(f"  a={a:.2f}: F = {n2_F(p):.12f}")
print()

lo, hi = min(1, r) / (r + 1), max(1, r) / (r + 1)
print(f"solved branch over the admissible bracket a in [{lo:.4f}, {hi:.4f}]:")
for a in np.linspace(lo, hi, 5):
    m = n2_moran_selection(float(a), c, r)
    print(f"  a={a:.4f} -> m={m:.6f},  F = {n2_F(N2Params(a=float(a), m=m, c=c, r=r)):.12f}")
print()

grid = 11
surface = sweep_n2(c, r, grid)
print(f"F on a {grid}x{grid} lattice (rows a from 0 to 1, columns m from 0 to 1):")
for row in surface:
    print("  " + " ".join(f"{v:5.2f}" for v in row))
print()
print("exact invariances of the surface (machine precision):")
p = N2Params(a=0.3, m=0.8, c=c, r=r)
swapped = N2Params(a=0.7, m=0.2, c=1 / c, r=r)
dual = N2Params(a=0.7, m=0.8, c=c, r=1 / r)
print(f"  vertex relabelling  F(m,a|c,r) - F(1-m,1-a|1/c,r) = "
      f"{n2_F(p) - n2_F(swapped):+.2e}")
print(f"  type-swap duality   F(m,1-a|c,1/r) - [(r+1) - r F(m,a|c,r)] = "
      f"{n2_F(dual) - ((r + 1) - r * n2_F(p)):+.2e}")
