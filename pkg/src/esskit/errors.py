"""Exception hierarchy.

Every domain error derives from :class:`EssError` (itself a ``ValueError``),
and the class name doubles as the error case reported by the CLI.
"""


class EssError(ValueError):
    """Base class for all domain errors raised by esskit."""


class AllZeroWeights(EssError):
    pass


class InvalidWeight(EssError):
    pass


class InvalidSize(EssError):
    pass


class IndexOutOfRange(EssError):
    pass


class NormalizationError(EssError):
    pass


class InvalidParameter(EssError):
    pass


class DomainError(EssError):
    pass


class DegenerateVariance(EssError):
    pass


class SingularDesign(EssError):
    pass


class FlatCurve(EssError):
    pass


class NotMonotone(EssError):
    pass


class CurveFormatError(EssError):
    pass
