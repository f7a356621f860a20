"""Replica-symmetric theory against finite-sample simulation.

Solves the six RS equations along an alpha grid (population dynamics for
the functional hazard fixed point, closed-form prior-side expectations)
and compares the predicted overlaps (w, v) with ground-truth overlaps of
fitted coefficients across repetitions.
"""

import numpy as np

from coxfield import (ElasticNetPenalty, GeneratorSpec, SignalSpec,
                      fit_amp, generate_dataset, reg_path, solve_rs_path,
                      true_overlaps)
from coxfield.solvers import SolverConfig

zeta, nu, theta0, l1_ratio = 2.0, 0.02, 1.0, 0.75
p, reps = 500, 8
gen = GeneratorSpec(zeta=zeta)
alphas = np.geomspace(0.55, 0.18, 6)
pens = [ElasticNetPenalty.from_strength(a / l1_ratio, l1_ratio) for a in alphas]

print("solving the RS equations along the path (one shared population) ...")
rs_points = solve_rs_path(pens, nu, theta0, zeta, gen, n_pop=20000, seed=0)

print(f"running {reps} simulation repetitions at p={p} ...")
w_sim = np.full((reps, len(pens)), np.nan)
v_sim = np.full((reps, len(pens)), np.nan)
for r in range(reps):
    sig = SignalSpec(p=p, nu=nu, theta0=theta0, seed=r)
    data, beta0 = generate_dataset(sig, gen, seed=r)
    fits = reg_path(data, pens, "amp", cfg=SolverConfig(max_epochs=2000))
    for i, fit in enumerate(fits):
        if fit.converged:
            w_sim[r, i], v_sim[r, i] = true_overlaps(fit.beta_hat, beta0)

print(f"\n{'alpha':>8} {'w (RS)':>9} {'w (sim)':>18} {'v (RS)':>9} {'v (sim)':>18}")
for i, alpha in enumerate(alphas):
    rs = rs_points[i]
    if rs is None:
        print(f"{alpha:8.4f}   RS solve failed")
        continue
    wm, ws = np.nanmean(w_sim[:, i]), np.nanstd(w_sim[:, i], ddof=1)
    vm, vs = np.nanmean(v_sim[:, i]), np.nanstd(v_sim[:, i], ddof=1)
    print(f"{alpha:8.4f} {rs[0].w:9.4f} {wm:9.4f} +- {ws:6.4f} "
          f"{rs[0].v:9.4f} {vm:9.4f} +- {vs:6.4f}")

print("\nthe RS columns are parameter-free predictions computed from the "
      "data-generating law alone; the simulation columns are empirical "
      "means over repetitions with their standard deviations")
