"""Piecewise-constant signal recovery with the fused (differences + identity)
transform, comparing the raw iterate with its support-projected refinement.
"""

import numpy as np

import splitlbi as sl
from splitlbi import estimators

spec = sl.SimulationSpec(design="fused1d")
problem = sl.metrics.make_replicate(spec, seed=11)
beta_star = problem.truth.beta_star

hyper = sl.Hyperparams.for_problem(problem, nu=10.0, kappa=200.0)
k_stop = int(round(12.0 / hyper.alpha))
path = sl.run(problem, hyper, k_max=k_stop, record_stride=k_stop)
final = path.points[-1]

support = np.flatnonzero(final.gamma)
beta_proj = estimators.projection_estimator(problem, final.beta, support)

print("coordinate | truth | raw iterate | projected")
for j in range(0, 20):
    print(f"  beta_{j:<4d} {beta_star[j]:6.2f}    {final.beta[j]:8.3f}  {beta_proj[j]:9.3f}")

err_raw = np.linalg.norm(final.beta - beta_star)
err_proj = np.linalg.norm(beta_proj - beta_star)
print(f"\nl2 error: raw {err_raw:.3f}, projected {err_proj:.3f}")

# the projection zeroes every unselected difference exactly, so the fitted
# signal is piecewise constant on the unselected change points
comp = np.setdiff1d(np.arange(problem.m), support)
print(f"max |D_unselected @ projected| = {np.abs(problem.D[comp] @ beta_proj).max():.2e}")
