"""Exception types raised across the package."""


class ModspaceError(ValueError):
    """Base class for all configuration and contract violations."""


class MismatchedGrid(ModspaceError):
    pass


class GridMismatch(ModspaceError):
    pass


class DimensionMismatch(ModspaceError):
    pass


class NonPositiveR(ModspaceError):
    pass


class RankMismatch(ModspaceError):
    pass


class NonFiniteInput(ModspaceError):
    pass


class ShapeMismatch(ModspaceError):
    pass


class NotAFrame(ModspaceError):
    pass


class ZOffGrid(ModspaceError):
    pass


class InfiniteThetaConstant(ModspaceError):
    pass


class UnsupportedA(ModspaceError):
    pass


class BlockMismatch(ModspaceError):
    pass


class MemoryGuard(ModspaceError):
    pass


class ExponentViolation(ModspaceError):
    pass


class NumericalFailure(ArithmeticError):
    pass
