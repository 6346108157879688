"""Exception types shared across the package."""


class IonentError(Exception):
    """Base class for all package errors."""


class ConfigError(IonentError):
    """Invalid configuration input.

    Carries the offending key so callers (and the CLI) can point at it.
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class GridMismatchError(IonentError):
    """Two quantities defined on incompatible grids were combined."""


class StepSizeError(IonentError):
    """Requested integration step is too coarse for the oscillation it must resolve."""

    def __init__(self, message: str, suggested_n: int | None = None):
        super().__init__(message)
        self.suggested_n = suggested_n


class UndefinedConditionError(IonentError):
    """A conditioned density matrix was requested where the conditioning norm vanishes."""


class NonHermitianError(IonentError):
    """Matrix handed to a Hermitian eigensolver is not Hermitian."""


class ConvergenceError(IonentError):
    """Iterative solver failed to reach its convergence criterion."""


class MeasureError(IonentError):
    """Invalid input to an entanglement measure (bad spectrum, broken density matrix)."""


class ValidationGateError(IonentError):
    """A physics validation gate (engine cross-check) failed."""
