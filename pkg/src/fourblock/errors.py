"""Exception hierarchy shared by all modules."""


class FourBlockError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(FourBlockError):
    pass


class ZeroVector(FourBlockError):
    pass


class ParseError(FourBlockError):
    pass


class DimensionMismatch(FourBlockError):
    pass


class NonIntegerEntry(FourBlockError):
    pass


class ParamsTooLarge(FourBlockError):
    pass


class FaceBudgetExceeded(FourBlockError):
    pass


class DomainViolation(FourBlockError):
    """An affine decomposition was evaluated outside its lattice/face domain."""


class BoundTooSmall(FourBlockError):
    pass


class NodeBudgetExceeded(FourBlockError):
    pass


class NotIntegral(FourBlockError):
    """A vertex that should be integral (TU structure) is not."""


class ReconstructionMismatch(FourBlockError):
    pass


class BoxTooLarge(FourBlockError):
    pass


class SearchBudgetExceeded(FourBlockError):
    pass


class NotInCone(FourBlockError):
    pass
