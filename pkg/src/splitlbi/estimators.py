"""Support-restricted estimators and the early-stopping rule.

The support-restricted ("oracle") estimator minimizes the split loss with the
sparse variable frozen to zero off a given support; the projection estimator
pushes an iterate onto the kernel of the off-support transform rows so its
transform inherits the selected sparsity pattern; the stopping rule converts
noise scale and spectral constants into a stopping time and iteration index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import conditions, linalg
from .errors import InvalidDimension, InvalidHyperparam, PathTooShort
from .lbi import Path
from .linalg import SpectralBounds
from .model import Problem


def oracle_estimator(problem: Problem, nu: float, S) -> tuple[np.ndarray, np.ndarray]:
    """Minimize the split loss over gamma supported on S (minimal-norm in beta).

    Eliminating gamma_S = D_S beta reduces the stationarity system to
    (X.T X / n + D_{S^c}.T D_{S^c} / nu) beta = X.T y / n, solved by
    pseudoinverse. Returns (beta, gamma) with gamma zero off S.
    """
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    S = np.asarray(sorted(set(int(j) for j in S)), dtype=int)
    if S.size and (S[0] < 0 or S[-1] >= problem.m):
        raise InvalidDimension(f"support indices must lie in [0, {problem.m})")
    comp = np.setdiff1d(np.arange(problem.m), S)
    Dsc = problem.D[comp]
    G = problem.X.T @ problem.X / problem.n + Dsc.T @ Dsc / nu
    beta = linalg.pseudoinverse((G + G.T) / 2.0) @ (problem.X.T @ problem.y / problem.n)
    gamma = np.zeros(problem.m)
    gamma[S] = problem.D[S] @ beta
    return beta, gamma


@dataclass(frozen=True)
class StoppingRule:
    """Stopping time tau_bar = eta/(8 sigma) * (d_min_pos/x_max) * sqrt(n/log m)
    and index k_bar = floor(tau_bar / alpha), with the inputs that produced them.
    """

    tau_bar: float
    k_bar: int
    eta: float
    sigma: float
    spectral: SpectralBounds
    n: int
    m: int
    alpha: float


def stopping_rule(
    eta: float, sigma: float, spectral: SpectralBounds, n: int, m: int, alpha: float
) -> StoppingRule:
    """Build the early-stopping rule; m must be at least 2 so log m > 0."""
    if m < 2:
        raise InvalidDimension(f"stopping rule needs m >= 2, got {m}")
    for name, val in (("eta", eta), ("sigma", sigma), ("alpha", alpha), ("n", n)):
        if not (val > 0):
            raise InvalidHyperparam(f"{name} must be positive, got {val}")
    if not (spectral.d_min_pos > 0 and spectral.x_max > 0):
        raise InvalidHyperparam("stopping rule needs positive spectral bounds")
    tau = (
        eta / (8.0 * sigma)
        * (spectral.d_min_pos / spectral.x_max)
        * math.sqrt(n / math.log(m))
    )
    return StoppingRule(
        tau_bar=tau,
        k_bar=int(math.floor(tau / alpha)),
        eta=eta,
        sigma=sigma,
        spectral=spectral,
        n=n,
        m=m,
        alpha=alpha,
    )


def projection_estimator(problem: Problem, beta, support) -> np.ndarray:
    """Project beta onto ker(D_{S^c}) for the complement of `support`.

    The transform of the result vanishes exactly on the unselected rows; a
    full support yields beta unchanged.
    """
    beta = np.asarray(beta, dtype=float)
    support = np.asarray(sorted(set(int(j) for j in support)), dtype=int)
    if support.size and (support[0] < 0 or support[-1] >= problem.m):
        raise InvalidDimension(f"support indices must lie in [0, {problem.m})")
    comp = np.setdiff1d(np.arange(problem.m), support)
    if comp.size == 0:
        return beta.copy()
    P = linalg.projection_onto_kernel(problem.D[comp])
    return P @ beta


@dataclass(frozen=True)
class ConsistencyReport:
    """Recovery quality of a recorded path at the stopping index."""

    k_bar: int
    no_false_positive_up_to_k_bar: bool
    sign_consistent_at_k_bar: bool
    l2_gamma: float
    l2_beta: float
    l2_beta_projected: float
    gamma_star_min: float
    signal_threshold: float


def signal_threshold(
    problem: Problem, S, nu: float, eta: float, sigma: float
) -> float:
    """The strong-signal level above which sign consistency at the stopping
    time is guaranteed by theory:
    16 sigma/(eta lam_h) * x_max d_max / d_min^2 * (2 log s + 5 + log(8 d_max))
    * sqrt(log m / n). Informational only; finite-sample slack is large.
    """
    S = np.asarray(sorted(set(int(j) for j in S)), dtype=int)
    if S.size == 0:
        return 0.0
    b = problem.spectral_bounds(S)
    lam_h = conditions.lambda_h(problem, S, nu)
    if lam_h <= 0 or eta <= 0:
        return math.inf
    s = S.size
    return (
        16.0 * sigma / (eta * lam_h)
        * (b.x_max * b.d_max / b.d_min_pos**2)
        * (2.0 * math.log(s) + 5.0 + math.log(8.0 * b.d_max))
        * math.sqrt(math.log(problem.m) / problem.n)
    )


def consistency_check(problem: Problem, path: Path, rule: StoppingRule) -> ConsistencyReport:
    """Evaluate support and sign recovery of a recorded path at k_bar.

    The path must contain the point k = k_bar (record at stride 1 up to the
    stopping index); earlier recorded points feed the no-false-positive check.
    """
    if problem.truth is None:
        raise InvalidHyperparam("consistency check requires ground truth")
    gamma_star = problem.gamma_star()
    S = np.flatnonzero(np.abs(gamma_star) > 0)
    k_bar = rule.k_bar
    recorded = {pt.k: pt for pt in path.points}
    if k_bar not in recorded:
        raise PathTooShort(
            f"path does not record iteration {k_bar} "
            f"(last recorded k = {max(recorded)})"
        )
    true_set = set(S.tolist())
    nfp = all(
        set(np.flatnonzero(pt.gamma).tolist()) <= true_set
        for pt in path.points
        if pt.k <= k_bar
    )
    at = recorded[k_bar]
    sign_ok = bool(np.array_equal(np.sign(at.gamma), np.sign(gamma_star)))
    beta_star = problem.truth.beta_star
    beta_proj = projection_estimator(problem, at.beta, np.flatnonzero(at.gamma))
    nonzero = np.abs(gamma_star[S]) if S.size else np.array([0.0])
    return ConsistencyReport(
        k_bar=k_bar,
        no_false_positive_up_to_k_bar=nfp,
        sign_consistent_at_k_bar=sign_ok,
        l2_gamma=float(np.linalg.norm(at.gamma - gamma_star)),
        l2_beta=float(np.linalg.norm(at.beta - beta_star)),
        l2_beta_projected=float(np.linalg.norm(beta_proj - beta_star)),
        gamma_star_min=float(nonzero.min()),
        signal_threshold=signal_threshold(
            problem, S, path.hyper.nu, rule.eta, rule.sigma
        ),
    )
