"""Exception hierarchy for ckpca.

Every error raised on bad input derives from :class:`CkpcaError`, which is a
``ValueError`` so callers that already guard numeric code with ``ValueError``
keep working.
"""


class CkpcaError(ValueError):
    """Base class for all ckpca errors."""


class AllConstantData(CkpcaError):
    pass


class DimensionMismatch(CkpcaError):
    pass


class InvalidKernel(CkpcaError):
    pass


class InvalidAlpha(CkpcaError):
    pass


class SegmentTooSmall(CkpcaError):
    pass


class CategoryTooSmall(CkpcaError):
    pass


class DegenerateGram(CkpcaError):
    pass


class NTooSmall(CkpcaError):
    pass


class InvalidConfig(CkpcaError):
    pass


class TooFewPoints(CkpcaError):
    pass


class TooShort(CkpcaError):
    pass


class LengthMismatch(CkpcaError):
    pass


class NotPSD(CkpcaError):
    pass


class BadDf(CkpcaError):
    pass


class BadScenario(CkpcaError):
    pass


class EmptyRecords(CkpcaError):
    pass


class ParseError(CkpcaError):
    pass
