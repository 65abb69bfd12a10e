"""
Limit-law specification schemas: {"kind": "...", parameters...}.
"""
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from galtonrank.core.config import settings
from galtonrank.core.errors import InvalidInputError
from galtonrank.models import limits as lm
from galtonrank.models.contact import (
    ContactClass,
    ContactPoint,
    ContactPosition,
    ContactSource,
    SmoothContactInfo,
)
from galtonrank.schemas.common import FractionField

Lambda = Annotated[float, Field(gt=0, lt=1)]


def _default_lambda() -> float:
    return settings.DEFAULT_LAMBDA


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)


class OccupationSpec(_Spec):
    kind: Literal["occupation"] = "occupation"
    intervals: List[Tuple[float, float]] = [(0.0, 1.0)]
    grid: Optional[int] = None

    @field_validator("intervals")
    @classmethod
    def check_intervals(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for lo, hi in v:
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"interval ({lo}, {hi}) is not inside [0, 1]")
        return v

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.OccupationOnSet(intervals=tuple(tuple(i) for i in self.intervals), grid=self.grid)


class InnerSpec(_Spec):
    kind: Literal["inner"] = "inner"
    t0: float = Field(..., gt=0, lt=1)
    r_L: float = Field(..., ge=1)
    r_R: float = Field(..., ge=1)
    C_L: float
    C_R: float
    lam: Lambda = Field(default_factory=_default_lambda)
    swapped: bool = False

    @model_validator(mode="after")
    def check_constants(self) -> "InnerSpec":
        if self.C_L == 0 or self.C_R == 0:
            raise ValueError("contact constants must be nonzero")
        return self

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.InnerT(
            t0=self.t0, r_L=self.r_L, r_R=self.r_R, C_L=self.C_L, C_R=self.C_R, lam=self.lam, swapped=self.swapped
        )


class ExtremalSpec(_Spec):
    kind: Literal["extremal"] = "extremal"
    end: Literal[0, 1]
    r: float = Field(..., ge=1)
    C: float
    lam: Lambda = Field(default_factory=_default_lambda)
    swapped: bool = False

    @field_validator("C")
    @classmethod
    def check_constant(cls, v: float) -> float:
        if v == 0:
            raise ValueError("contact constant must be nonzero")
        return v

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.ExtremalT(end=self.end, r=self.r, C=self.C, lam=self.lam, swapped=self.swapped)


class VirtualSpec(_Spec):
    kind: Literal["virtual"] = "virtual"
    contact_class: ContactClass = Field(..., alias="class")
    t0: float = Field(..., gt=0, lt=1)
    lam: Lambda = Field(default_factory=_default_lambda)

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @field_validator("contact_class")
    @classmethod
    def check_virtual(cls, v: ContactClass) -> ContactClass:
        if not v.is_virtual:
            raise ValueError(f"{v.value} is not a virtual class")
        return v

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.VirtualT(contact_class=self.contact_class, t0=self.t0, lam=self.lam)


class ContactTermSpec(_Spec):
    """One classified contact as produced by `contact analyze`."""

    t0: float = Field(..., ge=0, le=1)
    position: ContactPosition = ContactPosition.INNER
    contact_class: ContactClass = Field(..., alias="class")
    source: ContactSource = ContactSource.VIA_FG
    r_L: Optional[float] = None
    r_R: Optional[float] = None
    C_L: Optional[float] = None
    C_R: Optional[float] = None

    model_config = ConfigDict(extra="ignore", frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def check_sides(self) -> "ContactTermSpec":
        if self.contact_class.is_virtual:
            return self
        sides = [(r, c) for r, c in ((self.r_L, self.C_L), (self.r_R, self.C_R)) if r is not None]
        if not sides:
            raise ValueError("regular contacts need at least one (r, C) side")
        if any(c is None or c == 0 or r < 1 for r, c in sides):
            raise ValueError("each side needs r >= 1 and a nonzero C")
        return self

    def to_contact(self) -> ContactPoint:
        return ContactPoint(
            t0=self.t0,
            position=self.position,
            contact_class=self.contact_class,
            source=self.source,
            r_L=self.r_L,
            r_R=self.r_R,
            C_L=self.C_L,
            C_R=self.C_R,
        )


class GlobalSpec(_Spec):
    kind: Literal["global"] = "global"
    terms: List[ContactTermSpec]
    lam: Lambda = Field(default_factory=_default_lambda)

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.GlobalSum(terms=tuple(t.to_contact() for t in self.terms), lam=self.lam)


class FiniteSupportLimitSpec(_Spec):
    kind: Literal["finite_support"] = "finite_support"
    H: List[FractionField] = []
    V: List[FractionField] = []
    U: List[FractionField] = []
    L: List[FractionField] = []
    lam: Lambda = Field(default_factory=_default_lambda)
    harmonic: bool = False

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.FiniteSupportSum(
            H=tuple(self.H), V=tuple(self.V), U=tuple(self.U), L=tuple(self.L), lam=self.lam, harmonic=self.harmonic
        )


class SmoothTermSpec(_Spec):
    k: int = Field(..., ge=1)
    h: float
    t0: float = Field(..., gt=0, lt=1)
    x0: float = 0.0

    def to_info(self) -> SmoothContactInfo:
        return SmoothContactInfo(k=self.k, h_derivative=self.h, x0=self.x0, t0=self.t0)


class SmoothSpec(_Spec):
    kind: Literal["smooth"] = "smooth"
    contacts: List[SmoothTermSpec] = Field(..., min_length=1)
    lam: Lambda = Field(default_factory=_default_lambda)

    def to_limit_spec(self) -> lm.LimitLaw:
        return lm.SmoothSum(contacts=tuple(c.to_info() for c in self.contacts), lam=self.lam)


LimitLawSpec = Annotated[
    Union[
        OccupationSpec,
        InnerSpec,
        ExtremalSpec,
        VirtualSpec,
        GlobalSpec,
        FiniteSupportLimitSpec,
        SmoothSpec,
    ],
    Field(discriminator="kind"),
]

_adapter: TypeAdapter[Any] = TypeAdapter(LimitLawSpec)


def parse_limit(raw: Dict[str, Any] | Any) -> Any:
    """Validate a JSON object into one of the LimitLawSpec variants."""
    if isinstance(raw, BaseModel):
        return raw
    try:
        return _adapter.validate_python(raw)
    except ValueError as exc:
        raise InvalidInputError(f"invalid limit spec: {exc}") from exc


def load_limit(raw: Dict[str, Any] | Any) -> lm.LimitLaw:
    return parse_limit(raw).to_limit_spec()
