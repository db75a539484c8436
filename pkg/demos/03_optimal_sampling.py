"""Christoffel-function optimal sampling vs. plain Monte Carlo.

Draws training inputs from the optimal mixture measure of a polynomial
operator basis and compares Gram conditioning against unweighted draws at
the same certified sample size.
"""

import numpy as np

from opwls import (
    IndexSetSpec,
    PolyOperatorBasis,
    ProductMeasure,
    RngSeed,
    assemble,
    christoffel,
    generate,
    gram_diagnostics,
    min_samples,
    mixture_plan,
    optimal_weight,
    sample_monte_carlo,
    sample_optimal,
)
from opwls.sampling import build_induced_tables

d_in = 6
measure = ProductMeasure.from_alphas((np.arange(1, d_in + 1) ** 2).astype(float))
spec = IndexSetSpec(kind="hyperbolic_cross", radius=6.0, gamma=np.ones(d_in),
                    degree_cap=10)
basis = PolyOperatorBasis.build(measure, generate(spec), d_out=4)
print(f"N_eff = {basis.n_eff}, operator dimension N = {basis.n_total}")

point = np.full(d_in, 0.2)
w = optimal_weight(basis, point)
print(f"optimal weight at a sample point: {w:.4f}; weighted Christoffel value "
      f"{christoffel(basis, point, w):.6f} (constant N by construction)")

tables = build_induced_tables(measure, basis)
plan = mixture_plan(basis)
m = min_samples(basis.n_eff, 0.5, 0.5)
print(f"\ncertified sample size M = min_samples({basis.n_eff}, 1/2, 1/2) = {m}")

for trial in range(3):
    x, wts = sample_optimal(plan, tables, RngSeed(trial), m, basis)
    opt = gram_diagnostics(assemble(basis, x, wts, np.zeros((m, 1))))
    x, wts = sample_monte_carlo(measure, RngSeed(100 + trial), m, tables=tables)
    mc = gram_diagnostics(assemble(basis, x, wts, np.zeros((m, 1))))
    print(f"trial {trial}: cond(G) optimal {opt.condition:6.3f} "
          f"(gap {opt.spectral_gap:.3f})   monte carlo {mc.condition:6.3f} "
          f"(gap {mc.spectral_gap:.3f})")

print("\ncond(G) <= (1+delta)/(1-delta) = 3 is certified with probability "
      ">= 1/2 at this M; optimal draws sit comfortably inside it.")
