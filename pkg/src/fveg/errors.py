"""Exception hierarchy shared by the solver modules."""


class FVEGError(Exception):
    """Base class for all solver errors."""


class ConfigurationError(FVEGError, ValueError):
    pass


class InputError(FVEGError, ValueError):
    pass


class UsageError(FVEGError, ValueError):
    pass


class CapabilityError(FVEGError):
    """Requested quantity is not available for this problem (e.g. no exact solution)."""


class NumericalError(FVEGError, ArithmeticError):
    """Base for failures that originate in the numerics rather than the inputs."""


class StateValidityError(NumericalError):
    """Non-positive density/pressure or non-finite values."""

    def __init__(self, message, cells=None):
        super().__init__(message)
        self.cells = cells


class SupersonicLinearization(NumericalError):
    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class PredictionFailure(NumericalError):
    """An evolution operator produced an inadmissible point value."""

    def __init__(self, message, edges=None):
        super().__init__(message)
        self.edges = edges


class StepFailure(NumericalError):
    pass


class PathFailure(NumericalError):
    pass
