"""Exception types raised by the package."""


class GaussianWorkError(Exception):
    """Base class for all errors raised by gaussian_work."""


class NonHermitianInput(GaussianWorkError, ValueError):
    pass


class NotPositiveDefinite(GaussianWorkError, ValueError):
    pass


class NotPhysical(GaussianWorkError, ValueError):
    """The covariance matrix violates the uncertainty relation."""


class SingularConditioning(GaussianWorkError, ArithmeticError):
    pass


class DegenerateConditioning(GaussianWorkError, ArithmeticError):
    pass


class NonDiagonalInput(GaussianWorkError, ValueError):
    pass


class NonPositiveVariance(GaussianWorkError, ValueError):
    pass


class DomainError(GaussianWorkError, ValueError):
    """Closed-form boundary evaluated outside its domain."""


class EmptyBoundary(GaussianWorkError, ValueError):
    pass


class NoTransition(GaussianWorkError, ArithmeticError):
    pass


class InsufficientSamples(GaussianWorkError, ValueError):
    pass


class BadRange(GaussianWorkError, ValueError):
    pass
