"""Exception types shared across the package."""


class SplitLbiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(SplitLbiError):
    """A matrix argument is malformed (wrong ndim, non-finite entries)."""


class InvalidHyperparam(SplitLbiError):
    """A hyperparameter is out of its valid range (e.g. nu <= 0)."""


class InvalidDimension(SplitLbiError):
    """A dimension argument is out of range (e.g. m < 2 for the stopping rule)."""


class DivergenceDetected(SplitLbiError):
    """An iterate became non-finite; carries the iteration index and kappa*alpha*||H||_2."""

    def __init__(self, k: int, kappa_alpha_hnorm: float):
        self.k = k
        self.kappa_alpha_hnorm = kappa_alpha_hnorm
        super().__init__(
            f"non-finite iterate at k={k} (kappa*alpha*||H||_2 = {kappa_alpha_hnorm:.6g}; "
            "stable stepping requires <= 2)"
        )


class SingularRestrictedSigma(SplitLbiError):
    """The restricted Sigma block on the current support is rank-deficient."""

    def __init__(self, support):
        self.support = tuple(int(j) for j in support)
        super().__init__(f"Sigma restricted to support {self.support} is singular")


class SingularSigmaSS(SplitLbiError):
    """Sigma_{S,S} is not invertible to tolerance, so irr(nu) is undefined."""


class NoProgress(SplitLbiError):
    """The event-driven path solver failed to advance (cycling guard)."""


class OutOfRange(SplitLbiError):
    """A query time lies beyond the computed path horizon."""


class PathTooShort(SplitLbiError):
    """A recorded path does not cover the requested iteration index."""


class DegenerateLabels(SplitLbiError):
    """AUC is undefined because the true or null coordinate set is empty."""


class InvalidRecord(SplitLbiError):
    """A pairwise comparison record has invalid indices."""


class ParseError(SplitLbiError):
    """A data file could not be parsed; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
