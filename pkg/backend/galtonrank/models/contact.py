"""
Contact-point records.
"""
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple


class ContactClass(str, Enum):
    """Contact class enumeration."""
    CROSSING = "crossing"
    TANGENCY = "tangency"
    VIRTUAL_HORIZONTAL_CROSSING = "virtual_horizontal_crossing"
    VIRTUAL_VERTICAL_CROSSING = "virtual_vertical_crossing"
    UPPER_TANGENCY = "upper_tangency"
    LOWER_TANGENCY = "lower_tangency"

    @property
    def is_virtual(self) -> bool:
        return self not in (ContactClass.CROSSING, ContactClass.TANGENCY)


class ContactPosition(str, Enum):
    """Inner point of (0, 1) or an endpoint."""
    INNER = "inner"
    EXTREMAL = "extremal"


class ContactSource(str, Enum):
    """Which composite transform was expanded."""
    VIA_FG = "via_FG"
    VIA_GF = "via_GF"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


# Unit constants carried by virtual classes: (C_L, C_R)
VIRTUAL_CONSTANTS = {
    ContactClass.VIRTUAL_HORIZONTAL_CROSSING: (1.0, -1.0),
    ContactClass.VIRTUAL_VERTICAL_CROSSING: (-1.0, 1.0),
    ContactClass.UPPER_TANGENCY: (1.0, 1.0),
    ContactClass.LOWER_TANGENCY: (-1.0, -1.0),
}


@dataclass(frozen=True)
class IntensityEstimate:
    """Fit of log|Delta(h)| = log|C| + r log h on one side of a contact."""

    side: Side
    r: float
    C: float
    stderr: float
    eta: float
    snapped_r: Optional[float]
    steps: Tuple[float, ...] = ()

    @property
    def committed_r(self) -> float:
        return self.snapped_r if self.snapped_r is not None else max(self.r, 1.0)

    def as_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["side"] = self.side.value
        out["steps"] = list(self.steps)
        return out


@dataclass(frozen=True)
class ContactPoint:
    """A (generalized) contact point of F^{-1} and G^{-1}."""

    t0: float
    position: ContactPosition
    contact_class: ContactClass
    source: ContactSource = ContactSource.VIA_FG
    r_L: Optional[float] = None
    r_R: Optional[float] = None
    C_L: Optional[float] = None
    C_R: Optional[float] = None
    exact_t0: Optional[str] = None
    ambiguous_order: bool = False
    flat_sides: Tuple[str, ...] = ()
    provenance: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def effective_order(self) -> float:
        """Order used to pick the maximal terms of a global sum."""
        if self.contact_class.is_virtual:
            return 1.0
        r = max(x for x in (self.r_L, self.r_R) if x is not None)
        return r - 0.5 if self.position is ContactPosition.EXTREMAL else r

    @property
    def end(self) -> Optional[int]:
        if self.position is not ContactPosition.EXTREMAL:
            return None
        return 0 if self.t0 < 0.5 else 1

    def as_dict(self) -> Dict[str, Any]:
        return {
            "t0": self.t0,
            "exact_t0": self.exact_t0,
            "position": self.position.value,
            "class": self.contact_class.value,
            "source": self.source.value,
            "r_L": self.r_L,
            "r_R": self.r_R,
            "C_L": self.C_L,
            "C_R": self.C_R,
            "ambiguous_order": self.ambiguous_order,
            "flat_sides": list(self.flat_sides),
            "provenance": self.provenance,
        }

    def __repr__(self) -> str:
        return f"<ContactPoint(t0={self.t0:.6g}, {self.position.value}, {self.contact_class.value})>"


@dataclass(frozen=True)
class SmoothContactInfo:
    """Order k of a smooth contact and h^{(k)}(t0), h(t) = F_G(t) - t."""

    k: int
    h_derivative: float
    x0: float
    t0: float = 0.5


@dataclass(frozen=True)
class ContactScan:
    """Everything a scan of F_G (and G_F) learned about the fixed-point set."""

    points: Tuple[ContactPoint, ...]
    flat_segments: Tuple[Tuple[float, float], ...]
    fixed_point_measure: float
    cells: int
