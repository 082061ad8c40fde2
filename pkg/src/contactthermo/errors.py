"""Exception hierarchy shared by all modules."""


class ContactThermoError(Exception):
    """Base class for library errors."""


class DimensionError(ContactThermoError, ValueError):
    pass


class DomainError(ContactThermoError, ValueError):
    """Point outside the domain where a formula is defined (e.g. p_i <= 0)."""


class UnsupportedDimensionError(ContactThermoError, ValueError):
    pass


class DegenerateMetricError(ContactThermoError, ArithmeticError):
    pass


class GaugeSingularError(ContactThermoError, ArithmeticError):
    pass


class NumericError(ContactThermoError, ArithmeticError):
    """Non-finite intermediate values."""


class LegendreBreakdown(ContactThermoError, ArithmeticError):
    """The Hessian of a potential is singular (or changes definiteness) on the
    path of a Legendre transformation, so the transform is not a diffeomorphism."""

    def __init__(self, message, point=None, hessian=None):
        super().__init__(message)
        self.point = point
        self.hessian = hessian


class ConvergenceError(ContactThermoError, RuntimeError):
    def __init__(self, message, residual=None, iterate=None):
        super().__init__(message)
        self.residual = residual
        self.iterate = iterate


class DivergenceError(ContactThermoError, RuntimeError):
    """Flow left the overflow guard; ``trajectory`` holds the samples so far."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PhaseRuleError(ContactThermoError, ValueError):
    pass
