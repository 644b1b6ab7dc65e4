"""Exception hierarchy.

Every error raised by the package derives from :class:`SplineWaveError`, which
is itself a :class:`ValueError` so callers that only care about bad input can
catch the builtin.
"""


class SplineWaveError(ValueError):
    """Base class for all package errors."""


class DecreasingKnots(SplineWaveError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"knots decrease at index {index}")


class ExcessMultiplicity(SplineWaveError):
    def __init__(self, index: int, multiplicity: int, limit: int):
        self.index = index
        super().__init__(
            f"knot at index {index} has multiplicity {multiplicity}, limit is {limit}"
        )


class OutOfSupport(SplineWaveError):
    pass


class OrderUnderflow(SplineWaveError):
    pass


class NotARefinement(SplineWaveError):
    pass


class KnotOutOfRange(SplineWaveError):
    pass


class IndexOutOfRange(SplineWaveError):
    pass


class NotNested(SplineWaveError):
    pass


class DegenerateKnots(SplineWaveError):
    pass


class GridMismatch(SplineWaveError):
    pass


class GridTooSmall(SplineWaveError):
    pass


class ZeroGamma(SplineWaveError):
    pass


class PeriodMismatch(SplineWaveError):
    pass


class SingularSystem(SplineWaveError):
    pass


class RankDeficient(SplineWaveError):
    pass


class NotTranslationInvariant(SplineWaveError):
    pass


class VerifyFailed(SplineWaveError):
    pass


class ParseError(SplineWaveError):
    pass


class NoConvergence(SplineWaveError):
    pass
