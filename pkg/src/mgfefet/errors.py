"""Exception types for the simulation stack."""


class ConfigError(ValueError):
    """Bad configuration: unknown key, type mismatch, invalid value."""


class SolverError(RuntimeError):
    """Charge-balance solve failed to converge.

    Carries the last residual and, when raised inside a transient, the
    timestamp of the failing step.
    """

    def __init__(self, message, residual=None, time=None, cell=None):
        super().__init__(message)
        self.residual = residual
        self.time = time
        self.cell = cell


class TrainingError(RuntimeError):
    """Training diverged (non-finite loss)."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
