"""Exception hierarchy.

Every error raised on malformed input derives from :class:`CubeError`.
Errors that certify an input distance matrix cannot come from a complex in
the supported class derive from :class:`HypothesisViolation`, so callers can
tell "bad data" apart from "bug".
"""


class CubeError(Exception):
    pass


class RegularityViolation(CubeError):
    pass


class ChartMismatch(CubeError):
    pass


class BadCoords(CubeError):
    pass


class Disconnected(CubeError):
    pass


class NotTwoSided(CubeError):
    pass


class UnknownName(CubeError, KeyError):
    pass


class BudgetExhausted(CubeError):
    pass


class FormatError(CubeError):
    pass


class CollapseInconclusive(CubeError):
    pass


class HypothesisViolation(CubeError):
    """The input cannot be the boundary data of a supported complex."""


class InconsistentMatrix(HypothesisViolation):
    pass


class NoGoodConfiguration(HypothesisViolation):
    pass


class MissingOppositeVertex(HypothesisViolation):
    pass


class PatternMismatch(HypothesisViolation):
    pass


class MissingAttachment(HypothesisViolation):
    pass


class NotAdditive(HypothesisViolation):
    pass


class NoneFound(HypothesisViolation):
    pass


class DepthExceeded(HypothesisViolation):
    pass


class NotClean(CubeError):
    pass


class MissingCoords(CubeError):
    pass


class EulerViolation(CubeError):
    pass


class BoundViolation(CubeError):
    pass


class SpecError(CubeError):
    pass
