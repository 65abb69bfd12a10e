"""Exact measures, index reports and cumulative grids."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from galtonrank.core.errors import InvalidInputError

ExactMeasure = Fraction


def exact_measure(value: Fraction | int) -> ExactMeasure:
    """Validate a Lebesgue measure of a subset of (0, 1)."""
    value = Fraction(value)
    if not 0 <= value <= 1:
        raise InvalidInputError("measure outside [0, 1]", {"value": str(value)})
    return value


def fraction_str(value: Fraction) -> str:
    """Serialise as "p/q" (integers keep the "/1")."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class IndexReport:
    """Empirical index of two samples over the merged breakpoint grid."""

    gamma_hat: ExactMeasure
    tie_measure: ExactMeasure
    reverse_measure: ExactMeasure
    n: int
    m: int
    galton_count: Optional[int] = None

    def __post_init__(self) -> None:
        if self.gamma_hat + self.tie_measure + self.reverse_measure != 1:
            raise InvalidInputError("index report does not partition (0, 1)")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "galton_count": self.galton_count,
            "gamma_hat": fraction_str(self.gamma_hat),
            "gamma_hat_decimal": float(self.gamma_hat),
            "tie_measure": fraction_str(self.tie_measure),
            "reverse_measure": fraction_str(self.reverse_measure),
        }

    def __repr__(self) -> str:
        return f"<IndexReport(n={self.n}, m={self.m}, gamma_hat={self.gamma_hat})>"


@dataclass(frozen=True)
class CumulativeGrid:
    """Shared atoms x_1 < ... < x_k with P_i, Q_i for i = 0..k (P_0 = Q_0 = 0, P_k = Q_k = 1)."""

    atoms: Tuple[Fraction, ...]
    P: Tuple[Fraction, ...]
    Q: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        for name, levels in (("P", self.P), ("Q", self.Q)):
            if len(levels) != len(self.atoms) + 1 or levels[0] != 0 or levels[-1] != 1:
                raise InvalidInputError(f"{name} must run from 0 to 1 over the shared grid")
            if any(b < a for a, b in zip(levels, levels[1:])):
                raise InvalidInputError(f"{name} must be nondecreasing")

    @property
    def k(self) -> int:
        return len(self.atoms)

    @property
    def inner_levels(self) -> Tuple[Fraction, ...]:
        """Distinct P_i, Q_i strictly inside (0, 1)."""
        return tuple(sorted({lvl for lvl in (*self.P, *self.Q) if 0 < lvl < 1}))
