"""Exception types shared across the package."""


class IsolyapError(Exception):
    """Base for every error raised deliberately by this package."""


class DomainError(IsolyapError, ValueError):
    """An argument lies outside the region where a function is defined."""


class ConvergenceError(IsolyapError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within budget.

    ``partial`` holds the last value computed and ``terms`` the number of
    terms (or function evaluations) spent getting there.
    """

    def __init__(self, message, partial=None, terms=0):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class NormalizationError(IsolyapError, ValueError):
    """A density handed to an integrator does not integrate to one."""


class DivergentMomentError(IsolyapError, ValueError):
    """The requested moment does not exist for this ensemble."""


class VarianceGateError(IsolyapError, ValueError):
    """A Monte-Carlo moment would have infinite variance."""
