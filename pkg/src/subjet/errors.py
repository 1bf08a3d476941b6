"""Exception hierarchy shared by every module."""


class SubjetError(Exception):
    """Base class for all errors raised by the package."""


class DomainViolation(SubjetError, ValueError):
    """A density was evaluated outside the open set where it is smooth."""


class SingularM(SubjetError, ValueError):
    """The target split chart does not cover the submanifold jet."""


class SingularJacobian(SubjetError, ValueError):
    """A transition map has a (numerically) singular Jacobian."""


class NotRegularInChart(SubjetError, ValueError):
    """The x-block of a section jet is singular in the requested chart."""


class UnsupportedDimension(SubjetError, ValueError):
    pass


class StepFailure(SubjetError, ArithmeticError):
    """Integration left the timelike cone at a stage point."""


class ConfigError(SubjetError, ValueError):
    pass


class SamplingExhausted(SubjetError, RuntimeError):
    """Rejection sampling hit its limit before collecting enough points."""
