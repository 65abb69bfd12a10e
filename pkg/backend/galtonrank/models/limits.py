"""Limit-law specifications and bridge paths."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from galtonrank.core.errors import InvalidInputError
from galtonrank.models.contact import ContactClass, ContactPoint, SmoothContactInfo


def check_lambda(lam: float) -> float:
    if not 0.0 < lam < 1.0:
        raise InvalidInputError("lambda must lie in (0, 1)", {"lambda": lam})
    return float(lam)


@dataclass(frozen=True)
class BridgePath:
    """Bridge values on {0, 1/N, ..., 1}; `values` has shape (N+1,) or (paths, N+1)."""

    values: np.ndarray

    @property
    def N(self) -> int:  # noqa: N802
        return self.values.shape[-1] - 1

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)


@dataclass(frozen=True)
class OccupationOnSet:
    """l{t in A: B(t) > 0} for a union A of intervals."""

    intervals: Tuple[Tuple[float, float], ...]
    grid: Optional[int] = None


@dataclass(frozen=True)
class InnerT:
    t0: float
    r_L: float
    r_R: float
    C_L: float
    C_R: float
    lam: float
    swapped: bool = False


@dataclass(frozen=True)
class ExtremalT:
    end: int
    r: float
    C: float
    lam: float
    swapped: bool = False


@dataclass(frozen=True)
class VirtualT:
    contact_class: ContactClass
    t0: float
    lam: float


@dataclass(frozen=True)
class GlobalSum:
    terms: Tuple[ContactPoint, ...]
    lam: float


@dataclass(frozen=True)
class FiniteSupportSum:
    H: Tuple[Fraction, ...]
    V: Tuple[Fraction, ...]
    U: Tuple[Fraction, ...]
    L: Tuple[Fraction, ...]
    lam: float
    harmonic: bool = False


@dataclass(frozen=True)
class SmoothSum:
    """Smooth-density global limit over contacts of maximal order k0."""

    contacts: Tuple[SmoothContactInfo, ...]
    lam: float


LimitLaw = OccupationOnSet | InnerT | ExtremalT | VirtualT | GlobalSum | FiniteSupportSum | SmoothSum
