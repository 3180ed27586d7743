"""Model-selection condition diagnostics.

Quantifies when the sparse path recovers the true support: restricted strong
convexity constants of the split quadratic, the nu-indexed irrepresentable
value irr(nu) = max-row-sum of Sigma_{S^c,S} Sigma_{S,S}^{-1}, and the
transform-Lasso identifiability quantities ic0/ic1 built from the kernel of
the off-support transform rows. irr(nu) tends to ic0 as nu -> 0 and can drop
far below it for moderate nu, which is the whole point of the split.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import linalg, model
from .errors import InvalidDimension, SingularSigmaSS
from .model import Problem

_SIGMA_MIN_EIG = 1e-10


def _support_arrays(problem: Problem, S) -> tuple[np.ndarray, np.ndarray]:
    S = np.asarray(sorted(set(int(j) for j in S)), dtype=int)
    if S.size and (S[0] < 0 or S[-1] >= problem.m):
        raise InvalidDimension(f"support indices must lie in [0, {problem.m})")
    comp = np.setdiff1d(np.arange(problem.m), S)
    return S, comp


def identifiable_basis(problem: Problem, S) -> np.ndarray:
    """Orthonormal basis (columns) of the intersection of the identifiable
    span (row space of X plus row space of D) with the model subspace
    ker(D_{S^c}); empty when the intersection is trivial.

    Works in the coordinates of the span basis, where the constraint matrix
    keeps the scale of D (a projector-residual formulation would be
    numerically zero and defeat the relative rank cutoff).
    """
    S, comp = _support_arrays(problem, S)
    VL = linalg.range_basis(np.vstack([problem.X, problem.D]).T)
    if comp.size == 0 or VL.shape[1] == 0:
        return VL
    K = linalg.kernel_basis(problem.D[comp] @ VL)
    return VL @ K


def rsc_lambda(problem: Problem, S) -> float:
    """Smallest eigenvalue of the sample Gram X.T X / n on the identifiable
    model subspace; 0.0 when that subspace is trivial.
    """
    B = identifiable_basis(problem, S)
    if B.shape[1] == 0:
        return 0.0
    G = problem.X.T @ problem.X / problem.n
    return float(np.linalg.eigvalsh(B.T @ G @ B)[0])


def _h_block(problem: Problem, S, nu: float) -> np.ndarray:
    """The (beta, S)-restricted Hessian block: beta rows first, then the
    selected gamma rows in ascending index order.
    """
    S, _ = _support_arrays(problem, S)
    H = model.hessian(problem, nu)
    idx = np.concatenate([np.arange(problem.p), problem.p + S])
    return H[np.ix_(idx, idx)]


def lambda_h(problem: Problem, S, nu: float) -> float:
    """Smallest eigenvalue of the restricted Hessian block on the subspace
    spanned by the identifiable span (in beta) and all selected gamma
    coordinates. This is the computable restricted-convexity constant used
    by the early-stopping error bounds.
    """
    S, _ = _support_arrays(problem, S)
    Hb = _h_block(problem, S, nu)
    VL = linalg.range_basis(np.vstack([problem.X, problem.D]).T)
    s = S.size
    dim = VL.shape[1] + s
    if dim == 0:
        return 0.0
    Q = np.zeros((problem.p + s, dim))
    Q[: problem.p, : VL.shape[1]] = VL
    if s:
        Q[problem.p :, VL.shape[1] :] = np.eye(s)
    return float(np.linalg.eigvalsh(Q.T @ Hb @ Q)[0])


def _sigma_blocks(problem: Problem, S, nu: float):
    S, comp = _support_arrays(problem, S)
    _, Sigma = model.a_and_sigma(problem, nu)
    return S, comp, Sigma


def irr(problem: Problem, S, nu: float) -> float:
    """Max absolute row sum of Sigma_{S^c,S} Sigma_{S,S}^{-1}.

    Values below 1 certify the support-recovery condition at this nu.
    Raises SingularSigmaSS when Sigma_{S,S} is not invertible to tolerance.
    """
    S, comp, Sigma = _sigma_blocks(problem, S, nu)
    if S.size == 0 or comp.size == 0:
        return 0.0
    block = Sigma[np.ix_(S, S)]
    eigs = np.linalg.eigvalsh(block)
    if eigs[0] <= _SIGMA_MIN_EIG:
        raise SingularSigmaSS(
            f"min eigenvalue of Sigma_SS is {eigs[0]:.3e} at nu={nu}"
        )
    M = Sigma[np.ix_(comp, S)] @ np.linalg.inv(block)
    return float(np.abs(M).sum(axis=1).max())


def irr_vertex(problem: Problem, S, nu: float) -> float:
    """The same quantity by brute force over sign vectors, straight from the
    restricted Hessian and its pseudoinverse.

    The supremum of the sup-norm over the cube [-1,1]^s of a linear map is
    attained at a vertex, so enumerating all 2^s sign vectors is exact.
    Independent of the Sigma-based route; intended for cross-checks (s <= 12).
    """
    S, comp = _support_arrays(problem, S)
    s = S.size
    if s == 0 or comp.size == 0:
        return 0.0
    if s > 20:
        raise InvalidDimension(f"vertex enumeration over 2^{s} signs refused")
    H = model.hessian(problem, nu)
    idx = np.concatenate([np.arange(problem.p), problem.p + S])
    M = H[np.ix_(problem.p + comp, idx)] @ linalg.pseudoinverse(H[np.ix_(idx, idx)])
    best = 0.0
    for bits in range(2**s):
        rho = np.where((bits >> np.arange(s)) & 1, 1.0, -1.0)
        vec = M @ np.concatenate([np.zeros(problem.p), rho])
        best = max(best, float(np.abs(vec).max()))
    return best


def _chebyshev_min(c: np.ndarray, B: np.ndarray) -> float:
    """min over v of || c - B v ||_inf, via the standard linear program."""
    q, d = B.shape
    if q == 0:
        return 0.0
    if d == 0:
        return float(np.abs(c).max())
    # variables (v, t): minimize t s.t. -t <= c - B v <= t
    A_ub = np.block(
        [[-B, -np.ones((q, 1))], [B, -np.ones((q, 1))]]
    )
    b_ub = np.concatenate([-c, c])
    res = linprog(
        np.concatenate([np.zeros(d), [1.0]]),
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"Chebyshev LP failed: {res.message}")
    return float(res.fun)


def ic_quantities(problem: Problem, S, sign_pattern) -> tuple[float, float]:
    """The identifiability pair (ic0, ic1) of the transform Lasso.

    With W an orthonormal basis of ker(D_{S^c}) and
    Omega = pinv(D_{S^c}).T (G W pinv(W' G W) W' - I) D_S.T for G = X.T X / n:
    ic0 is the max absolute row sum of Omega, and ic1 minimizes
    || Omega sign_pattern - u ||_inf over u in ker(D_{S^c}.T).
    """
    S, comp = _support_arrays(problem, S)
    sign_pattern = np.asarray(sign_pattern, dtype=float)
    if sign_pattern.shape != (S.size,):
        raise InvalidDimension(
            f"sign_pattern must have length {S.size}, got {sign_pattern.shape}"
        )
    Ds = problem.D[S]
    Dsc = problem.D[comp]
    G = problem.X.T @ problem.X / problem.n
    W = linalg.kernel_basis(Dsc)
    core = G @ W @ linalg.pseudoinverse(W.T @ G @ W) @ W.T - np.eye(problem.p)
    Omega = linalg.pseudoinverse(Dsc).T @ core @ Ds.T
    ic0 = float(np.abs(Omega).sum(axis=1).max()) if Omega.size else 0.0
    K = linalg.kernel_basis(Dsc.T)
    ic1 = _chebyshev_min(Omega @ sign_pattern, K)
    return ic0, ic1


def r_prime(problem: Problem) -> int:
    """Dimension of the image of ker(D) under X."""
    ker = linalg.kernel_basis(problem.D)
    if ker.shape[1] == 0:
        return 0
    return linalg.compact_svd(problem.X @ ker).rank


@dataclass(frozen=True)
class IrrCurvePoint:
    nu: float
    irr: Optional[float]
    error: Optional[str] = None


@dataclass(frozen=True)
class IrrCurve:
    """irr evaluated on a nu grid, with the nu-independent reference values."""

    points: tuple[IrrCurvePoint, ...]
    ic0: float
    ic1: Optional[float]
    first_nu_below_one: Optional[float]


def irr_curve(problem: Problem, S, nu_grid, sign_pattern=None) -> IrrCurve:
    """Evaluate irr over an ascending positive nu grid.

    Per-point singularity failures are recorded on the point, not raised.
    ic1 requires a sign pattern (taken from the truth when present); it is
    left None otherwise.
    """
    nu_grid = np.asarray(nu_grid, dtype=float)
    if nu_grid.ndim != 1 or nu_grid.size == 0:
        raise InvalidDimension("nu_grid must be a nonempty 1-d array")
    if np.any(nu_grid <= 0) or np.any(np.diff(nu_grid) <= 0):
        raise InvalidDimension("nu_grid must be positive and strictly ascending")
    S_arr, _ = _support_arrays(problem, S)
    if sign_pattern is None and problem.truth is not None:
        sign_pattern = np.sign(problem.gamma_star()[S_arr])
    points = []
    first_below = None
    for nu in nu_grid:
        try:
            val = irr(problem, S_arr, float(nu))
            points.append(IrrCurvePoint(float(nu), val))
            if first_below is None and val < 1.0:
                first_below = float(nu)
        except SingularSigmaSS as exc:
            points.append(IrrCurvePoint(float(nu), None, error=str(exc)))
    if sign_pattern is not None:
        ic0, ic1 = ic_quantities(problem, S_arr, sign_pattern)
    else:
        ic0, _ = ic_quantities(problem, S_arr, np.ones(S_arr.size))
        ic1 = None
        warnings.warn("no sign pattern available; ic1 omitted from irr curve")
    return IrrCurve(tuple(points), ic0, ic1, first_below)


@dataclass(frozen=True)
class ConditionReport:
    """Bundle of every diagnostic for one (problem, support) pair."""

    rsc: float
    lambda_h: dict[float, float]
    irr: dict[float, float]
    irr_errors: dict[float, str] = field(default_factory=dict)
    ic0: float = 0.0
    ic1: Optional[float] = None
    spectral: Optional[linalg.SpectralBounds] = None
    r_prime: int = 0

    def eta_implied(self, nu: float) -> float:
        """1 - irr(nu), floored at 0."""
        return max(0.0, 1.0 - self.irr[nu])


def condition_report(problem: Problem, S, nus, sign_pattern=None) -> ConditionReport:
    """Evaluate all diagnostics on a set of nu values."""
    S_arr, _ = _support_arrays(problem, S)
    if sign_pattern is None and problem.truth is not None:
        sign_pattern = np.sign(problem.gamma_star()[S_arr])
    irr_vals: dict[float, float] = {}
    irr_errs: dict[float, str] = {}
    lam_h: dict[float, float] = {}
    for nu in nus:
        nu = float(nu)
        lam_h[nu] = lambda_h(problem, S_arr, nu)
        try:
            irr_vals[nu] = irr(problem, S_arr, nu)
        except SingularSigmaSS as exc:
            irr_errs[nu] = str(exc)
    if sign_pattern is not None:
        ic0, ic1 = ic_quantities(problem, S_arr, sign_pattern)
    else:
        ic0, _ = ic_quantities(problem, S_arr, np.ones(S_arr.size))
        ic1 = None
    return ConditionReport(
        rsc=rsc_lambda(problem, S_arr),
        lambda_h=lam_h,
        irr=irr_vals,
        irr_errors=irr_errs,
        ic0=ic0,
        ic1=ic1,
        spectral=problem.spectral_bounds(S_arr),
        r_prime=r_prime(problem),
    )
