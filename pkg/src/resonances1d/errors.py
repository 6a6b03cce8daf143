"""Exception hierarchy shared by all engines."""


class ResonanceError(Exception):
    """Base class for every error raised by this package."""


class InputError(ResonanceError, ValueError):
    """Invalid user input (bad potential description, bad parameters)."""


class ComputationError(ResonanceError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy answer."""


class BarrierOverlap(InputError):
    pass


class NonPositiveBarrier(InputError):
    pass


class NonZeroEndpoints(InputError):
    pass


class NonMonotoneKnots(InputError):
    pass


class UnsupportedBody(InputError):
    pass


class OrderTooSmall(InputError):
    pass


class MeshMismatch(InputError):
    pass


class PotentialParseError(InputError):
    pass


class Ambiguous(InputError):
    pass


class InsufficientData(InputError):
    pass


class PoleAtEvaluationPoint(ComputationError):
    pass


class ContourThroughZero(ComputationError):
    pass


class SolverFailure(ComputationError):
    pass


class IncomingVanishes(ComputationError):
    pass


class ResonantDenominator(ComputationError):
    pass
