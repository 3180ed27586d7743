"""Walk through a single sparse-recovery run on a standard Lasso problem.

Generates the benchmark instance (n = p = 50, signal 2/-2/0, unit noise),
runs the damped Bregman iteration, and prints when each true coordinate
activates along the path, plus the support-recovery AUC.
"""

import numpy as np

import splitlbi as sl

spec = sl.SimulationSpec(design="lasso")
problem = sl.metrics.make_replicate(spec, seed=7)
S = problem.support()

hyper = sl.Hyperparams.for_problem(problem, nu=10.0, kappa=200.0)
print(f"step size alpha = {hyper.alpha:.3e} (default stability rule)")

entries = sl.metrics.run_entry_times(problem, hyper, t_max=50.0)
auc = sl.auc_support(entries, S)

order = np.argsort(entries.times)
print("\nfirst twenty activations (coordinate, time, truth?):")
for j in order[:20]:
    t = entries.times[j]
    tag = "signal" if j in set(S.tolist()) else "null"
    print(f"  gamma_{j:<2d}  t = {t:7.3f}   {tag}")

print(f"\nsupport-recovery AUC: {auc:.4f}")

# a short recorded path for plotting: k, t, loss, gamma columns
path = sl.run(problem, hyper, k_max=3000, record_stride=100)
print(f"\nloss along the path (recorded every 100 steps):")
print("  " + "  ".join(f"{pt.loss:.3f}" for pt in path.points[:10]) + " ...")
assert np.all(np.diff(path.losses()) <= 1e-12), "loss must be non-increasing"
print("loss is non-increasing, as guaranteed at the default step size")
