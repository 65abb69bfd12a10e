"""
Error hierarchy. Every domain failure is a GaltonError; the CLI turns the
exit_code attribute into the process status.
"""
from typing import Any, Dict, Optional, Tuple


class GaltonError(Exception):
    """Base class for domain errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def as_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "details": self.details}


class InvalidInputError(GaltonError, ValueError):
    """A precondition on the inputs does not hold."""


class ScanBudgetExceeded(GaltonError):
    """Sign scan found more transitions than the contact budget allows."""

    def __init__(self, interval: Tuple[float, float], budget: int):
        lo, hi = interval
        super().__init__(
            f"scan budget {budget} exhausted; unresolved subinterval ({lo:.12g}, {hi:.12g})",
            {"interval": [lo, hi], "budget": budget},
        )
        self.interval = interval


class LocallyFlatError(GaltonError):
    """Delta vanishes on the whole step ladder (virtual-contact regime)."""


class OrderExceedsError(GaltonError):
    """No derivative of h is distinguishable from zero up to kmax."""


class HorizonError(GaltonError):
    """An extremal sampler could not certify its truncation horizon."""


class UsageError(GaltonError):
    """Command-line misuse."""

    exit_code = 2
