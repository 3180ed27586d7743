"""Exact event-driven solver for the infinite-damping, vanishing-step limit
of the split iteration.

In that limit the subgradient rho(t) is piecewise linear and (beta, gamma)
are piecewise constant. After eliminating beta through stationarity,
beta(t) = pinv(A) (nu * X.T y / n + D.T gamma(t)), the sparse variable on a
segment solves a sign-constrained quadratic program

    gamma = argmin  (1/2) gamma' Sigma gamma - w' gamma
            s.t.    gamma_j >= 0 where rho_j = +1,
                    gamma_j <= 0 where rho_j = -1,
                    gamma_j  = 0 where |rho_j| < 1,

with w = D pinv(A) X.T y / n, and the inactive coordinates of rho move
linearly with slope w - Sigma gamma. Events are boundary hits |rho_j| = 1;
at each event the quadratic program is re-solved by an active-set loop.
Event times are exact rational roots of the affine coordinate functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, model
from .errors import (
    InvalidHyperparam,
    NoProgress,
    OutOfRange,
    SingularRestrictedSigma,
)
from .lbi import PathPoint
from .model import Problem

# |rho| within this of 1 counts as sitting on the boundary
_EDGE_TOL = 1e-9
# slopes below this are treated as zero when predicting events
_SLOPE_TOL = 1e-13
_MIN_EIG_TOL = 1e-12


@dataclass(frozen=True)
class IssSegment:
    """One maximal interval on which gamma and beta are constant.

    active holds the boundary coordinates whose subgradient is pinned at
    +-1 with zero slope (the support of gamma plus just-activated indices
    still at zero); signs carries their +-1 pattern. rho is affine:
    rho(t) = rho_start + (t - t_start) * rho_slope, with rho_slope zero on
    the active set. t_end is +inf for a terminal stationary segment.

    beta always solves the data-fit stationarity equation given gamma; the
    nominal all-zero start exists only at the single instant t = 0 (beta
    jumps to the stationary value immediately), so sampling treats t = 0
    specially.
    """

    t_start: float
    t_end: float
    active: np.ndarray
    signs: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    rho_start: np.ndarray
    rho_slope: np.ndarray

    def rho_at(self, t: float) -> np.ndarray:
        return self.rho_start + (t - self.t_start) * self.rho_slope


@dataclass(frozen=True)
class IssPath:
    """Segment sequence plus the problem and nu that generated it."""

    problem: Problem
    nu: float
    segments: tuple[IssSegment, ...]

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def segment_at(self, t: float) -> IssSegment:
        """The segment whose value the right-continuous path takes at t."""
        if t < 0 or t > self.t_end:
            raise OutOfRange(f"t={t} outside the computed horizon [0, {self.t_end}]")
        for seg in self.segments:
            if t < seg.t_end:
                return seg
        return self.segments[-1]


def _constrained_gamma(Sigma, w, boundary, signs, max_sweeps) -> np.ndarray:
    """Minimize (1/2) g'Sigma g - w'g subject to supp(g) within `boundary`
    and signs[j] * g_j >= 0 there. Primal-dual active-set loop; coordinates
    enter/leave one at a time, smallest index first.
    """
    m = w.shape[0]
    gamma = np.zeros(m)
    if boundary.size == 0:
        return gamma
    sgn = {int(j): float(s) for j, s in zip(boundary, signs)}
    working = list(int(j) for j in boundary)
    for _ in range(max_sweeps):
        if working:
            T = np.array(sorted(working), dtype=int)
            block = Sigma[np.ix_(T, T)]
            eigs = np.linalg.eigvalsh(block)
            if eigs[0] <= _MIN_EIG_TOL * max(1.0, eigs[-1]):
                raise SingularRestrictedSigma(T)
            x = np.linalg.solve(block, w[T])
            bad = [int(j) for j, v in zip(T, x) if sgn[int(j)] * v < 0]
            if bad:
                working.remove(min(bad))
                continue
            gamma = np.zeros(m)
            gamma[T] = x
        else:
            gamma = np.zeros(m)
        # dual feasibility: a resting boundary coordinate must not be pulled
        # back out of the band (sign * slope <= 0)
        slope = w - Sigma @ gamma
        pulled = [
            int(j)
            for j in sorted(sgn)
            if j not in working and sgn[j] * slope[j] > _SLOPE_TOL
        ]
        if not pulled:
            return gamma
        working.append(min(pulled))
    raise NoProgress("sign-constrained restricted solve did not converge")


def solve_path(problem: Problem, nu: float, t_max: float) -> IssPath:
    """Compute the exact piecewise path from t = 0 up to t_max.

    Terminates early with an infinite final segment once the inactive
    subgradient slope vanishes. Raises SingularRestrictedSigma when the
    restricted quadratic form degenerates on an encountered support (the
    path is no longer unique there) and NoProgress if an event fails to
    advance time.
    """
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    if not (t_max > 0):
        raise InvalidHyperparam(f"t_max must be positive, got {t_max}")
    A, Sigma = model.a_and_sigma(problem, nu)
    A_dag = linalg.pseudoinverse(A)
    xty = problem.X.T @ problem.y / problem.n
    w = problem.D @ A_dag @ xty
    beta_base = nu * (A_dag @ xty)

    m = problem.m
    max_sweeps = 50 * max(m, 1)
    rho = np.zeros(m)
    t = 0.0
    segments: list[IssSegment] = []
    for _ in range(max_sweeps):
        on_boundary = np.flatnonzero(np.abs(rho) >= 1.0 - _EDGE_TOL)
        signs = np.sign(rho[on_boundary])
        gamma = _constrained_gamma(Sigma, w, on_boundary, signs, max_sweeps)
        supp = np.flatnonzero(gamma)
        slope = w - Sigma @ gamma
        slope[supp] = 0.0  # exact KKT on the support
        active = np.flatnonzero(
            (np.abs(rho) >= 1.0 - _EDGE_TOL) & (np.abs(slope) <= _SLOPE_TOL)
        )
        active = np.union1d(active, supp)
        slope[active] = 0.0
        beta = beta_base + A_dag @ (problem.D.T @ gamma)

        # next boundary hit among coordinates that still move
        dt_hit = np.full(m, np.inf)
        moving = np.flatnonzero(np.abs(slope) > _SLOPE_TOL)
        for j in moving:
            target = 1.0 if slope[j] > 0 else -1.0
            dt_hit[j] = (target - rho[j]) / slope[j]
        dt = float(dt_hit.min()) if moving.size else np.inf

        if not np.isfinite(dt):
            segments.append(
                IssSegment(t, np.inf, active, np.sign(rho[active]).astype(float),
                           gamma, beta, rho.copy(), slope)
            )
            return IssPath(problem, nu, tuple(segments))
        if dt <= _SLOPE_TOL * max(1.0, t):
            raise NoProgress(f"event time failed to advance at t={t}")
        if t + dt >= t_max:
            segments.append(
                IssSegment(t, t_max, active, np.sign(rho[active]).astype(float),
                           gamma, beta, rho.copy(), slope)
            )
            return IssPath(problem, nu, tuple(segments))

        segments.append(
            IssSegment(t, t + dt, active, np.sign(rho[active]).astype(float),
                       gamma, beta, rho.copy(), slope)
        )
        rho = rho + dt * slope
        hits = np.flatnonzero(dt_hit <= dt * (1.0 + 1e-12))
        rho[hits] = np.sign(slope[hits])  # land exactly on +-1
        t = t + dt
    raise NoProgress(f"exceeded {max_sweeps} events before reaching t_max")


def sample_path(path: IssPath, t_grid) -> list[PathPoint]:
    """Evaluate (beta, gamma, rho) on a sorted time grid within the horizon.

    Returns points in the discrete-path record format; k is the grid index
    and z is taken equal to rho (its infinite-damping limit).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1:
        raise InvalidHyperparam("t_grid must be one-dimensional")
    if np.any(np.diff(t_grid) < 0):
        raise InvalidHyperparam("t_grid must be sorted ascending")
    points = []
    for k, t in enumerate(t_grid):
        t = float(t)
        if t == 0.0:  # the all-zero initialization, before beta jumps
            zero_b = np.zeros(path.problem.p)
            zero_g = np.zeros(path.problem.m)
            points.append(
                PathPoint(
                    k=k, t=0.0, beta=zero_b, gamma=zero_g,
                    z=np.zeros(path.problem.m), rho=np.zeros(path.problem.m),
                    loss=model.loss(path.problem, path.nu, zero_b, zero_g),
                )
            )
            continue
        seg = path.segment_at(t)
        rho = seg.rho_at(t)
        points.append(
            PathPoint(
                k=k,
                t=t,
                beta=seg.beta.copy(),
                gamma=seg.gamma.copy(),
                z=rho.copy(),
                rho=rho,
                loss=model.loss(path.problem, path.nu, seg.beta, seg.gamma),
            )
        )
    return points
