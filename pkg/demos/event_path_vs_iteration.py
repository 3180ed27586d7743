"""The exact event-driven path against its discrete approximation.

For a small problem the infinite-damping limit can be solved exactly: the
subgradient moves piecewise linearly and the sparse variable jumps at
boundary-hit events. A heavily damped discrete run with a tiny step follows
the same activation script.
"""

import numpy as np

import splitlbi as sl
from splitlbi import metrics, model

rng = np.random.default_rng(42)
X = rng.standard_normal((6, 6))
beta_star = np.array([3.0, -2.0, 1.5, 0.0, 0.0, 0.0])
y = 8.0 * (X @ beta_star + 0.05 * rng.standard_normal(6))
problem = sl.Problem(X=X, y=y, D=np.eye(6))
nu = 0.5

path = sl.solve_path(problem, nu, t_max=1.2)
print("exact path segments:")
for seg in path.segments:
    end = f"{seg.t_end:.4f}" if np.isfinite(seg.t_end) else "inf"
    print(f"  [{seg.t_start:.4f}, {end}]  support={np.flatnonzero(seg.gamma).tolist()}")

alpha = model.default_step_size(problem, nu, 1e4) / 10.0
hyper = sl.Hyperparams(nu=nu, kappa=1e4, alpha=alpha)
discrete = metrics.support_sequence(problem, hyper, t_max=1.2)
print(f"\ndiscrete support sequence at kappa=1e4, alpha={alpha:.2e}:")
print(f"  {discrete}")

iss_seq = []
for seg in path.segments:
    supp = tuple(np.flatnonzero(seg.gamma).tolist())
    if not iss_seq or iss_seq[-1] != supp:
        iss_seq.append(supp)
print(f"\nsequences match: {iss_seq == discrete}")

samples = sl.sample_path(path, np.linspace(0.0, 1.0, 5))
print("\nsampled points (t, loss):")
for pt in samples:
    print(f"  t={pt.t:.3f}  loss={pt.loss:.4f}")
