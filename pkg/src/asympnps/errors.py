"""Exception types raised by the solver."""


class InvalidInputError(ValueError):
    pass


class PresetNotFoundError(KeyError):
    pass


class ProfileFormatError(ValueError):
    pass


class StateError(ArithmeticError):
    """An intermediate state is unphysical (e.g. a non-positive density)."""


class UnsupportedGeometryError(ValueError):
    pass


class UnsolvableError(ValueError):
    """The radial problem has no solution (wall charge without mobile charge)."""


class NonConvergenceError(RuntimeError):
    """An iteration hit its cap. ``trace`` holds the residual history."""

    def __init__(self, message, trace=None, context=None):
        super().__init__(message)
        self.trace = list(trace or [])
        self.context = context or {}
