"""Exception types raised by meanprop."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class DimensionError(ValueError):
    """Observation vectors or matrices have incompatible shapes."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical method failed to reach its tolerance."""
