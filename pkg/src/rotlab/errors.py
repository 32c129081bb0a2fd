"""Exception hierarchy.

Errors split into two families that the CLI maps to exit codes:
``PreconditionError`` (bad inputs, exit 2) and ``NumericalFailure``
(the computation ran but could not deliver, exit 3).
"""


class RotlabError(Exception):
    """Base class for every error raised by rotlab."""

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        out.update(self.details)
        return out


class PreconditionError(RotlabError, ValueError):
    pass


class NumericalFailure(RotlabError, RuntimeError):
    pass


class DomainEscape(NumericalFailure):
    """A map sent a point of the open annulus outside 0 < u < 1."""


class InsufficientConvergence(NumericalFailure):
    pass


class UnboundedDisplacement(PreconditionError):
    pass


class NotInU(PreconditionError):
    pass


class LineNotFree(PreconditionError):
    pass


class NotEnclosable(PreconditionError):
    pass


class DegenerateAngle(PreconditionError):
    pass


class ChainOrderViolated(PreconditionError):
    pass


class BracketInvalid(PreconditionError):
    pass


class FoldDetected(NumericalFailure):
    """The image of a graph-line is no longer a graph over the height."""


class NotDisjoint(NumericalFailure):
    pass


class NotFound(NumericalFailure):
    pass
