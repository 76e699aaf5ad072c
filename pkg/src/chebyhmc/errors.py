"""Exception types raised across the package."""


class DegenerateSpectrumError(ValueError):
    """Raised when an operation needs ``L > m`` but got ``L == m``."""


class NonFiniteStateError(FloatingPointError):
    """Raised when the leapfrog integrator produces a non-finite state."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver exhausts its iteration budget."""


class ConstantSeriesError(ValueError):
    """Raised when a diagnostic needs a series with nonzero variance."""


class ScheduleError(ValueError):
    """Raised when a schedule is incompatible with a leapfrog step size."""
