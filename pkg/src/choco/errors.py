"""Exception types raised across the package."""


class ChocoError(Exception):
    """Base class for all package errors."""


class NonConvergence(ChocoError):
    """Root finder failed to meet its residual tolerance after all retries."""


class NotAFactor(ChocoError):
    """Polynomial division left a remainder above tolerance."""


class NonPositiveLeading(ChocoError):
    """Hurwitz matrix requested for a polynomial with leading coefficient <= 0."""


class StabilityConsistencyError(ChocoError):
    """Root location and Routh-Hurwitz minors disagree on a stable polynomial."""


class ParseError(ChocoError, ValueError):
    pass


class InvalidConfiguration(ChocoError, ValueError):
    pass


class OddCoefficientNonzero(ChocoError):
    """A coefficient that must vanish identically for the template did not."""


class NoSolutions(ChocoError):
    """No Newton start converged."""


class NoFeasibleSolution(ChocoError):
    """Every candidate violates a sign or residual constraint."""


class OutOfRange(ChocoError, ValueError):
    """Dilation pushes the critical points out of the unit disk."""


class CertificationFailed(ChocoError):
    """A certificate predicate failed; ``predicate`` names which one."""

    def __init__(self, predicate: str, detail: str = ""):
        self.predicate = predicate
        self.detail = detail
        msg = predicate if not detail else f"{predicate}: {detail}"
        super().__init__(msg)
