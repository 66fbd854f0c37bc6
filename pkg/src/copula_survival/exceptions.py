from __future__ import annotations

from typing import Any


class ConfigError(ValueError):
    """Raised when a command configuration fails validation."""


class NumericalError(RuntimeError):
    """
    Raised when a computation produces non-finite values or fails to
    converge.

    Attributes:
        record_index (int | None): The index of the offending record within
            its batch, when the failure can be traced to a single record.
    """

    def __init__(self, message: str, record_index: int | None = None):
        super().__init__(message)
        self.record_index = record_index


class InversionError(NumericalError):
    """Raised when a bracketed root search does not converge."""


class TrainingDivergedError(NumericalError):
    """
    Raised when the validation log-likelihood becomes NaN or -inf.

    Attributes:
        history (list[Any]): The per-epoch history recorded up to (and
            including) the diverged epoch.
    """

    def __init__(self, message: str, history: list[Any]):
        super().__init__(message)
        self.history = history
