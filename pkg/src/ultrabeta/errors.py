"""Exception hierarchy shared by all ultrabeta modules."""


class UltraBetaError(Exception):
    """Base class for all library errors."""


class ShapeError(UltraBetaError):
    """Malformed triangle/trapezoid: row j does not have j entries."""


class CannotProjectError(UltraBetaError):
    """Attempt to erase the last row of a size-1 triangle."""


class PoleError(UltraBetaError):
    """Gamma function evaluated at a non-positive integer."""

    def __init__(self, n: int):
        self.n = n
        super().__init__(f"log_gamma pole at z = {n}")


class DivergentError(UltraBetaError):
    """Parameters violate a convergence inequality; message names it."""


class DomainError(UltraBetaError):
    """Input violates interlacing/positivity preconditions."""


class SingularError(UltraBetaError):
    """Coincident points make the requested quantity singular."""


class AccuracyError(UltraBetaError):
    """Quadrature refinement stalled; carries the best value found."""

    def __init__(self, message: str, best_value, error_estimate: float):
        self.best_value = best_value
        self.error_estimate = error_estimate
        super().__init__(message)


class ProposalMismatchError(UltraBetaError):
    """Importance-sampling proposal does not cover the integrand support."""


class RejectionCapError(UltraBetaError):
    """Rejection sampler exceeded its retry cap."""
