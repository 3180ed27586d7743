"""Discrete split Bregman-boosting iteration and path recording.

State is (beta, z) with the sparse variable recovered through the shrinkage
map: gamma = kappa * shrink(z, 1). One step from (beta_k, gamma_k):

    beta_{k+1} = beta_k - kappa * alpha * grad_beta(beta_k, gamma_k)
    z_{k+1}    = z_k    -         alpha * grad_gamma(beta_k, gamma_k)
    gamma_{k+1} = kappa * shrink(z_{k+1}, 1)

The companion subgradient form carries (rho, gamma) with rho in the l1
subdifferential of gamma; the two forms are related by the Moreau split
z = rho + gamma / kappa and produce the same trajectory. `run_rho_form`
implements that second form as an independent code path for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .errors import DivergenceDetected, InvalidHyperparam
from .model import Hyperparams, Problem


def shrink(z, lam: float = 1.0) -> np.ndarray:
    """Soft-thresholding sign(z) * max(|z| - lam, 0), entrywise."""
    if lam < 0:
        raise InvalidHyperparam(f"shrinkage threshold must be >= 0, got {lam}")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


@dataclass(frozen=True)
class PathPoint:
    """One recorded iterate: index k, time t = k * alpha, and the state tuple.

    gamma = kappa * shrink(z, 1) holds exactly, and rho = z - shrink(z, 1) is
    an l1 subgradient of gamma (rho_j = sign(gamma_j) on the support,
    |rho_j| <= 1 everywhere). Off-support gamma entries are exact zeros.
    """

    k: int
    t: float
    beta: np.ndarray
    gamma: np.ndarray
    z: np.ndarray
    rho: np.ndarray
    loss: float


@dataclass(frozen=True)
class Path:
    """Ordered recorded iterates plus the hyperparameters that produced them."""

    points: tuple[PathPoint, ...]
    hyper: Hyperparams
    record_stride: int

    def __len__(self) -> int:
        return len(self.points)

    def times(self) -> np.ndarray:
        return np.array([pt.t for pt in self.points])

    def losses(self) -> np.ndarray:
        return np.array([pt.loss for pt in self.points])

    def gamma_matrix(self) -> np.ndarray:
        return np.stack([pt.gamma for pt in self.points])

    def beta_matrix(self) -> np.ndarray:
        return np.stack([pt.beta for pt in self.points])

    def point_at_index(self, k: int) -> PathPoint:
        for pt in self.points:
            if pt.k == k:
                return pt
        raise KeyError(f"no recorded point with k={k}")


def _gram(problem: Problem) -> tuple[np.ndarray, np.ndarray]:
    n = problem.n
    return problem.X.T @ problem.X / n, problem.X.T @ problem.y / n


def _soft1(z):
    # z - clip(z, -1, 1) equals the unit shrinkage map entrywise (the only
    # difference is the sign of zero, which never feeds back into arithmetic)
    return z - np.clip(z, -1.0, 1.0)


def _transform_or_none(D: np.ndarray):
    """None stands for the identity transform in the hot loop; multiplying by
    an exact identity is bit-for-bit the same, just slower."""
    p = D.shape[1]
    if D.shape == (p, p) and np.array_equal(D, np.eye(p)):
        return None
    return D


def _advance(C, b, D, nu, kappa, alpha, beta, z):
    """One canonical update; C = X.T X / n and b = X.T y / n are precomputed.

    D may be None, meaning the identity transform.
    """
    gamma = kappa * _soft1(z)
    if D is None:
        gap = beta - gamma
        grad_beta = C @ beta - b + gap / nu
    else:
        gap = D @ beta - gamma
        grad_beta = C @ beta - b + (D.T @ gap) / nu
    beta = beta - (kappa * alpha) * grad_beta
    z = z + (alpha / nu) * gap
    return beta, z


def _point(problem, nu, kappa, k, alpha, beta, z) -> PathPoint:
    shr = shrink(z, 1.0)
    gamma = kappa * shr
    rho = z - shr
    return PathPoint(
        k=k,
        t=k * alpha,
        beta=beta.copy(),
        gamma=gamma,
        z=z.copy(),
        rho=rho,
        loss=model.loss(problem, nu, beta, gamma),
    )


def initial_point(problem: Problem, hyper: Hyperparams) -> PathPoint:
    """The all-zero starting iterate (k = 0)."""
    alpha = hyper.alpha if hyper.alpha is not None else 0.0
    return _point(
        problem, hyper.nu, hyper.kappa, 0, alpha,
        np.zeros(problem.p), np.zeros(problem.m),
    )


def step(problem: Problem, hyper: Hyperparams, state: PathPoint) -> PathPoint:
    """Advance one iteration from a recorded state."""
    hyper = hyper.resolved(problem)
    C, b = _gram(problem)
    beta, z = _advance(
        C, b, _transform_or_none(problem.D), hyper.nu, hyper.kappa, hyper.alpha,
        state.beta, state.z,
    )
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(z))):
        raise DivergenceDetected(state.k + 1, _kappa_alpha_hnorm(problem, hyper))
    return _point(problem, hyper.nu, hyper.kappa, state.k + 1, hyper.alpha, beta, z)


def _kappa_alpha_hnorm(problem: Problem, hyper: Hyperparams) -> float:
    H = model.hessian(problem, hyper.nu)
    return hyper.kappa * hyper.alpha * float(np.linalg.norm(H, 2))


def run(
    problem: Problem,
    hyper: Hyperparams,
    k_max: int,
    record_stride: int = 1,
) -> Path:
    """Iterate k_max steps from zero, recording every record_stride-th point.

    The initial point (k = 0) and the final point are always recorded. An
    unset alpha is resolved by the default step-size rule.
    """
    if k_max < 0:
        raise InvalidHyperparam(f"k_max must be >= 0, got {k_max}")
    if record_stride < 1:
        raise InvalidHyperparam(f"record_stride must be >= 1, got {record_stride}")
    hyper = hyper.resolved(problem)
    nu, kappa, alpha = hyper.nu, hyper.kappa, hyper.alpha
    C, b = _gram(problem)
    D = _transform_or_none(problem.D)
    beta = np.zeros(problem.p)
    z = np.zeros(problem.m)
    points = [_point(problem, nu, kappa, 0, alpha, beta, z)]
    for k in range(1, k_max + 1):
        beta, z = _advance(C, b, D, nu, kappa, alpha, beta, z)
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(z))):
            raise DivergenceDetected(k, _kappa_alpha_hnorm(problem, hyper))
        if k % record_stride == 0 or k == k_max:
            points.append(_point(problem, nu, kappa, k, alpha, beta, z))
    return Path(points=tuple(points), hyper=hyper, record_stride=record_stride)


def run_rho_form(
    problem: Problem,
    hyper: Hyperparams,
    k_max: int,
    record_stride: int = 1,
) -> Path:
    """Same trajectory computed in the explicit (rho, gamma) subgradient form.

    The state keeps rho and gamma separately and recombines them through the
    Moreau split each step. Used as an independent cross-check of `run`.
    """
    if k_max < 0:
        raise InvalidHyperparam(f"k_max must be >= 0, got {k_max}")
    hyper = hyper.resolved(problem)
    nu, kappa, alpha = hyper.nu, hyper.kappa, hyper.alpha
    C, b = _gram(problem)
    D = problem.D
    beta = np.zeros(problem.p)
    rho = np.zeros(problem.m)
    gamma = np.zeros(problem.m)
    points = [_point(problem, nu, kappa, 0, alpha, beta, np.zeros(problem.m))]
    for k in range(1, k_max + 1):
        gap = D @ beta - gamma
        grad_beta = C @ beta - b + (D.T @ gap) / nu
        beta = beta - (kappa * alpha) * grad_beta
        w = rho + gamma / kappa + (alpha / nu) * gap
        shr = shrink(w, 1.0)
        gamma = kappa * shr
        rho = w - shr
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(w))):
            raise DivergenceDetected(k, _kappa_alpha_hnorm(problem, hyper))
        if k % record_stride == 0 or k == k_max:
            points.append(
                PathPoint(
                    k=k,
                    t=k * alpha,
                    beta=beta.copy(),
                    gamma=gamma.copy(),
                    z=rho + gamma / kappa,
                    rho=rho.copy(),
                    loss=model.loss(problem, nu, beta, gamma),
                )
            )
    return Path(points=tuple(points), hyper=hyper, record_stride=record_stride)


def run_lbiss_reference(
    problem: Problem,
    nu: float,
    kappa: float,
    t_max: float,
    dt: float | None = None,
    record_stride: int = 1,
) -> Path:
    """Forward-Euler integration of the small-step limit ODE in (beta, z).

    At step size dt the Euler scheme coincides with the discrete iteration at
    alpha = dt, so this is a thin reference wrapper: its default dt is the
    stability bound divided by 10, giving a dense integration used only as a
    cross-check for small-step behaviour.
    """
    if t_max < 0:
        raise InvalidHyperparam(f"t_max must be >= 0, got {t_max}")
    if dt is None:
        dt = model.default_step_size(problem, nu, kappa) / 10.0
    if not (dt > 0 and np.isfinite(dt)):
        raise InvalidHyperparam(f"dt must be positive, got {dt}")
    k_max = int(np.ceil(t_max / dt - 1e-12)) if t_max > 0 else 0
    return run(
        problem,
        Hyperparams(nu=nu, kappa=kappa, alpha=dt),
        k_max=k_max,
        record_stride=record_stride,
    )
