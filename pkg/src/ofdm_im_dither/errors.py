"""Exception types raised by the toolkit."""


class OfdmImError(ValueError):
    """Base class for all toolkit errors."""


class InvalidConfigError(OfdmImError):
    pass


class InvalidIndexError(OfdmImError):
    pass


class InvalidPatternError(OfdmImError):
    pass


class UnusedPatternError(OfdmImError):
    """Raised when an activation pattern lies outside the SAP codebook."""


class InvalidSymbolError(OfdmImError):
    pass


class InvalidInputError(OfdmImError):
    pass


class InvalidSubblockError(OfdmImError):
    pass


class InvalidLengthError(OfdmImError):
    pass


class UndefinedPaprError(OfdmImError):
    pass


class InvalidTapsError(OfdmImError):
    pass


class DegenerateCaseError(OfdmImError):
    pass


class InvalidCaseError(OfdmImError):
    """PEP case outside the validity domain of the closed-form expression."""


class InvalidDistanceError(OfdmImError):
    pass


class NonPositiveMetricError(OfdmImError):
    pass
