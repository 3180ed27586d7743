"""Dense linear-algebra kernels used throughout the package.

Everything is built on a single rank-truncated SVD with a relative cutoff, so
pseudoinverses, kernel bases and projections all share one tolerance regime.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrix

DEFAULT_RANK_TOL = 1e-10


def as_matrix(M) -> np.ndarray:
    """Coerce to a finite 2-d float array, raising InvalidMatrix otherwise."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise InvalidMatrix(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix contains non-finite entries")
    return M


@dataclass(frozen=True)
class CompactSvd:
    """Rank-truncated factors M = U @ diag(S) @ V.T with orthonormal columns.

    Only singular triplets above the rank cutoff are kept; a zero matrix has
    empty factors.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.S.size)

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.S) @ self.V.T


def compact_svd(M, rank_tol: float = DEFAULT_RANK_TOL) -> CompactSvd:
    """SVD keeping only triplets with sigma > rank_tol * sigma_max."""
    M = as_matrix(M)
    if M.size == 0 or not M.any():
        return CompactSvd(
            np.zeros((M.shape[0], 0)), np.zeros(0), np.zeros((M.shape[1], 0))
        )
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > rank_tol * s[0]
    return CompactSvd(U[:, keep], s[keep], Vt[keep].T)


def pseudoinverse(M, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse, computed from the compact SVD."""
    M = as_matrix(M)
    f = compact_svd(M, rank_tol)
    if f.rank == 0:
        return np.zeros((M.shape[1], M.shape[0]))
    return (f.V / f.S) @ f.U.T


def kernel_basis(M, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of ker(M), as columns; the identity if M has no rows."""
    M = as_matrix(M)
    p = M.shape[1]
    if M.shape[0] == 0 or M.size == 0 or not M.any():
        return np.eye(p)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    r = int(np.sum(s > rank_tol * s[0]))
    return Vt[r:].T


def range_basis(M, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of M, as columns."""
    return compact_svd(M, rank_tol).U


def projection_onto_kernel(M, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthogonal projector P = I - pinv(M) @ M onto ker(M).

    A matrix with zero rows projects onto all of R^p (P = I).
    """
    M = as_matrix(M)
    p = M.shape[1]
    P = np.eye(p) - pseudoinverse(M, rank_tol) @ M
    return (P + P.T) / 2.0


@dataclass(frozen=True)
class SpectralBounds:
    """Spectral constants of a (X, D) pair.

    d_min_pos: smallest nonzero singular value of D, also minimized with the
        off-support row block when a support is supplied.
    d_max: largest singular value of D.
    x_max: largest singular value of X / sqrt(n), i.e. the square root of the
        largest eigenvalue of X.T @ X / n.
    """

    d_min_pos: float
    d_max: float
    x_max: float


def _sv_extremes(M) -> tuple[float, float]:
    # (smallest nonzero, largest) singular values; (0, 0) for a zero matrix
    f = compact_svd(M)
    if f.rank == 0:
        return 0.0, 0.0
    return float(f.S[-1]), float(f.S[0])


def spectral_bounds(X, D, S=()) -> SpectralBounds:
    """Spectral constants (smallest-nonzero/largest sv of D, scaled norm of X).

    S is an optional set of row indices of D; the smallest-nonzero bound is
    then taken over both D and its off-support row block. An empty complement
    omits that term.
    """
    X = as_matrix(X)
    D = as_matrix(D)
    n = X.shape[0]
    d_min, d_max = _sv_extremes(D)
    s_idx = np.asarray(sorted(set(int(j) for j in S)), dtype=int)
    comp = np.setdiff1d(np.arange(D.shape[0]), s_idx)
    if s_idx.size and comp.size:
        d_min_comp, _ = _sv_extremes(D[comp])
        d_min = min(d_min, d_min_comp)
    x_max = 0.0
    if X.size and X.any():
        x_max = float(np.linalg.svd(X, compute_uv=False)[0]) / np.sqrt(n)
    return SpectralBounds(d_min_pos=d_min, d_max=d_max, x_max=x_max)
