"""Exception types shared across the package."""


class RieszLabError(Exception):
    """Base class for all package errors."""


class DomainError(RieszLabError, ValueError):
    """A parameter lies outside the domain where a quantity exists."""


class NotPositiveDefinite(DomainError):
    """A matrix expected to be positive definite failed the pivot test."""


class UnsupportedAlgebra(RieszLabError, ValueError):
    """The requested operation needs matrix arithmetic the algebra lacks."""


class UnorderedInput(RieszLabError, ValueError):
    """Singular values or eigenvalues were not given in decreasing order."""


class WeightTooLarge(RieszLabError, ValueError):
    pass


class TooManyParts(RieszLabError, ValueError):
    pass


class SingularTransform(RieszLabError, ValueError):
    pass


class IntegrationFailure(RieszLabError, RuntimeError):
    """Adaptive quadrature exhausted its node budget."""


class ShapeMismatch(RieszLabError, ValueError):
    pass
