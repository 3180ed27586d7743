"""Problem data model, split quadratic loss, gradients, Hessian, and the
derived matrices driving the reduced sparse dynamics.

The model is y = X beta + noise with structural sparsity on gamma = D beta.
The split loss couples a data-fit term with a gap penalty:

    loss(beta, gamma) = ||y - X beta||^2 / (2n) + ||gamma - D beta||^2 / (2 nu)

Throughout, sample-scaled inner products use X.T / n (the 1/n factor lives in
the loss, and in A = nu * X.T X / n + D.T D where the reduced dynamics need it).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidHyperparam, InvalidMatrix


@dataclass(frozen=True, eq=False)
class Truth:
    """Ground truth attached to a synthetic problem: signal vector and noise scale."""

    beta_star: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "beta_star", np.asarray(self.beta_star, dtype=float))
        if self.beta_star.ndim != 1:
            raise InvalidMatrix("beta_star must be a vector")
        if not np.all(np.isfinite(self.beta_star)):
            raise InvalidMatrix("beta_star contains non-finite entries")
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise InvalidHyperparam(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class Problem:
    """Immutable problem data (X, y, D) with optional ground truth.

    Shapes: X is n x p, y has n entries, D is m x p. When truth is present the
    true support is the exact nonzero set of D @ beta_star.
    """

    X: np.ndarray
    y: np.ndarray
    D: np.ndarray
    truth: Optional[Truth] = None

    def __post_init__(self):
        X = linalg.as_matrix(self.X)
        D = linalg.as_matrix(self.D)
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1:
            raise InvalidMatrix("y must be a vector")
        if not np.all(np.isfinite(y)):
            raise InvalidMatrix("y contains non-finite entries")
        if X.shape[0] != y.shape[0]:
            raise InvalidMatrix(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
            )
        if D.shape[1] != X.shape[1]:
            raise InvalidMatrix(
                f"X has {X.shape[1]} columns but D has {D.shape[1]}"
            )
        if self.truth is not None and self.truth.beta_star.shape[0] != X.shape[1]:
            raise InvalidMatrix("beta_star length does not match the column count of X")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return self.D.shape[0]

    def gamma_star(self) -> np.ndarray:
        """D @ beta_star; requires truth."""
        if self.truth is None:
            raise InvalidHyperparam("problem has no ground truth")
        return self.D @ self.truth.beta_star

    def support(self) -> np.ndarray:
        """Exact nonzero set of D @ beta_star (sorted indices); requires truth."""
        return np.flatnonzero(np.abs(self.gamma_star()) > 0)

    def spectral_bounds(self, S=()) -> linalg.SpectralBounds:
        return linalg.spectral_bounds(self.X, self.D, S)


def default_step_size(problem: Problem, nu: float, kappa: float) -> float:
    """Step size nu / (kappa * (1 + nu * x_max^2 + d_max^2)).

    This saturates the stability bound kappa * alpha * ||H||_2 <= 2, so the
    loss is non-increasing along the iterate path.
    """
    _check_nu_kappa(nu, kappa)
    b = problem.spectral_bounds()
    return nu / (kappa * (1.0 + nu * b.x_max**2 + b.d_max**2))


def _check_nu_kappa(nu: float, kappa: float):
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    if not (kappa > 0 and np.isfinite(kappa)):
        raise InvalidHyperparam(f"kappa must be positive, got {kappa}")


@dataclass(frozen=True)
class Hyperparams:
    """(nu, kappa, alpha) triple; alpha may be left None and resolved later.

    nu is the split penalty, kappa the damping of the sparse variable, alpha
    the step size. `for_problem` applies the default step-size rule.
    """

    nu: float
    kappa: float
    alpha: Optional[float] = None

    def __post_init__(self):
        _check_nu_kappa(self.nu, self.kappa)
        if self.alpha is not None and not (self.alpha > 0 and np.isfinite(self.alpha)):
            raise InvalidHyperparam(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def for_problem(cls, problem: Problem, nu: float, kappa: float) -> "Hyperparams":
        alpha = default_step_size(problem, nu, kappa)
        b = problem.spectral_bounds()
        bound = nu / (1.0 + nu * b.x_max**2 + b.d_max**2)
        assert kappa * alpha <= bound * (1.0 + 1e-12)
        return cls(nu=nu, kappa=kappa, alpha=alpha)

    def resolved(self, problem: Problem) -> "Hyperparams":
        """Return a copy with a concrete alpha (default rule if unset)."""
        if self.alpha is not None:
            return self
        return Hyperparams(
            nu=self.nu,
            kappa=self.kappa,
            alpha=default_step_size(problem, self.nu, self.kappa),
        )


def loss(problem: Problem, nu: float, beta, gamma) -> float:
    """||y - X beta||^2/(2n) + ||gamma - D beta||^2/(2 nu)."""
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    r = problem.y - problem.X @ beta
    g = gamma - problem.D @ beta
    return float(r @ r / (2.0 * problem.n) + g @ g / (2.0 * nu))


def grad(problem: Problem, nu: float, beta, gamma) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of the split loss in (beta, gamma)."""
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    gap = problem.D @ beta - gamma
    g_beta = problem.X.T @ (problem.X @ beta - problem.y) / problem.n + (
        problem.D.T @ gap
    ) / nu
    g_gamma = -gap / nu
    return g_beta, g_gamma


def hessian(problem: Problem, nu: float) -> np.ndarray:
    """(p+m) x (p+m) Hessian of the split loss, beta block first.

    [[X.T X / n + D.T D / nu,  -D.T / nu],
     [-D / nu,                  I_m / nu]]
    """
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    X, D = problem.X, problem.D
    p, m = problem.p, problem.m
    H = np.empty((p + m, p + m))
    H[:p, :p] = X.T @ X / problem.n + D.T @ D / nu
    H[:p, p:] = -D.T / nu
    H[p:, :p] = -D / nu
    H[p:, p:] = np.eye(m) / nu
    return H


def a_and_sigma(problem: Problem, nu: float) -> tuple[np.ndarray, np.ndarray]:
    """The p x p matrix A = nu * X.T X / n + D.T D and the m x m matrix
    Sigma = (I - D pinv(A) D.T) / nu governing the reduced sparse dynamics.
    """
    if not (nu > 0 and np.isfinite(nu)):
        raise InvalidHyperparam(f"nu must be positive, got {nu}")
    X, D = problem.X, problem.D
    A = nu * (X.T @ X) / problem.n + D.T @ D
    A = (A + A.T) / 2.0
    Sigma = (np.eye(problem.m) - D @ linalg.pseudoinverse(A) @ D.T) / nu
    return A, (Sigma + Sigma.T) / 2.0
