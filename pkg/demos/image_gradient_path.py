"""Total-variation style denoising on a tiny image via the grid-gradient
transform: the path picks up salient structure before fitting the noise.
"""

import numpy as np

import splitlbi as sl
from splitlbi import designs

rng = np.random.default_rng(0)
h = w = 10
clean = np.zeros((h, w))
clean[2:8, 2:8] = 2.0
clean[4:6, 4:6] = 4.0
noisy = clean.copy()
salt = rng.random((h, w)) < 0.08
noisy[salt] = 6.0

y = noisy.ravel()
D = designs.build_grid_gradient(h, w)
problem = sl.Problem(X=np.eye(y.size), y=y, D=D)

hyper = sl.Hyperparams.for_problem(problem, nu=5.0, kappa=50.0)
k_max = int(round(120.0 / hyper.alpha))
path = sl.run(problem, hyper, k_max=k_max, record_stride=max(1, k_max // 8))

print("t, active gradient rows, reconstruction error vs clean image:")
for pt in path.points:
    active = int(np.count_nonzero(pt.gamma))
    err = np.linalg.norm(pt.beta - clean.ravel())
    print(f"  t={pt.t:7.2f}  edges={active:4d}  error={err:7.3f}")

actives = [int(np.count_nonzero(pt.gamma)) for pt in path.points]
assert all(b >= a for a, b in zip(actives, actives[1:])), \
    "edge activation grows along this path"
print("\nactive edge set grows monotonically on this run")
