"""Exception hierarchy shared by every module of the package."""


class OMFError(Exception):
    """Base class for all errors raised by opmonotone."""


class InvalidMeasure(OMFError, ValueError):
    """A measure (or one of its parts) violates its invariants."""


class NegativeWeight(InvalidMeasure):
    pass


class LocationOutOfRange(InvalidMeasure):
    pass


class NonIntegrableExponent(InvalidMeasure):
    pass


class OverlappingIFSMaps(InvalidMeasure):
    pass


class NonFiniteMass(InvalidMeasure):
    pass


class NegativeCoefficient(InvalidMeasure):
    pass


class ZeroMass(InvalidMeasure):
    pass


class InvalidSpec(OMFError, ValueError):
    """A JSON measure spec or catalog request could not be parsed."""


class MaxDepthExceeded(OMFError, RuntimeError):
    """Adaptive refinement hit its depth cap without meeting the tolerance."""


class DomainError(OMFError, ValueError):
    pass


class NotSymmetric(OMFError, ValueError):
    """Raised for non-symmetric matrices and for non-symmetric measures."""


class NotNormalized(OMFError, ValueError):
    pass


class UnknownName(InvalidSpec, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParamOutOfRange(InvalidSpec):
    pass


class NoConvergence(OMFError, RuntimeError):
    pass


class NegativeSpectrum(OMFError, ValueError):
    pass


class NotPositiveDefinite(OMFError, ValueError):
    pass


class DimensionMismatch(OMFError, ValueError):
    pass
