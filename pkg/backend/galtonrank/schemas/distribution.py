"""
Distribution specification schemas: {"kind": "...", parameters...}.
"""
from typing import Annotated, Any, Dict, List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from galtonrank.core.errors import InvalidInputError
from galtonrank.models import distribution as dm
from galtonrank.schemas.common import FractionField


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)


class Uniform01Spec(_Spec):
    kind: Literal["uniform01"] = "uniform01"

    def to_distribution(self) -> dm.Distribution:
        return dm.Uniform01()


class NormalSpec(_Spec):
    kind: Literal["normal"] = "normal"
    mu: float = 0.0
    sigma: float = Field(1.0, gt=0)

    def to_distribution(self) -> dm.Distribution:
        return dm.Normal(mu=self.mu, sigma=self.sigma)


class StudentTSpec(_Spec):
    kind: Literal["student_t"] = "student_t"
    nu: float = Field(..., gt=0)
    mu: float = 0.0

    def to_distribution(self) -> dm.Distribution:
        return dm.StudentTShift(nu=self.nu, mu=self.mu)


class FiniteSupportSpec(_Spec):
    kind: Literal["finite_support"] = "finite_support"
    atoms: List[FractionField]
    probs: List[FractionField]

    @model_validator(mode="after")
    def check_lengths(self) -> "FiniteSupportSpec":
        if len(self.atoms) != len(self.probs):
            raise ValueError("atoms and probs must have equal length")
        return self

    def to_distribution(self) -> dm.Distribution:
        return dm.FiniteSupport(atoms=tuple(self.atoms), probs=tuple(self.probs))


class BernoulliSpec(_Spec):
    kind: Literal["bernoulli"] = "bernoulli"
    p: FractionField

    def to_distribution(self) -> dm.Distribution:
        return dm.Bernoulli(self.p)


class PowerCrossSpec(_Spec):
    kind: Literal["power_cross"] = "power_cross"
    r: float = Field(..., gt=0)

    def to_distribution(self) -> dm.Distribution:
        return dm.PowerCrossQuantile(r=self.r)


class PowerTangentSpec(_Spec):
    kind: Literal["power_tangent"] = "power_tangent"
    r: float = Field(..., gt=0)

    def to_distribution(self) -> dm.Distribution:
        return dm.PowerTangentQuantile(r=self.r)


class EmpiricalSpec(_Spec):
    kind: Literal["empirical"] = "empirical"
    values: List[float] = Field(..., min_length=1)

    def to_distribution(self) -> dm.Distribution:
        return dm.Empirical(values=tuple(self.values))


class SegmentSpec(_Spec):
    c: float = 0.0
    slope: float = 0.0
    scale: float = 0.0
    anchor: float = 0.0
    power: float = Field(1.0, gt=0)
    signed: bool = True


class PiecewiseQuantileSpec(_Spec):
    kind: Literal["piecewise_quantile"] = "piecewise_quantile"
    breakpoints: List[float] = []
    segments: List[SegmentSpec] = Field(..., min_length=1)

    def to_distribution(self) -> dm.Distribution:
        return dm.PiecewiseQuantile(
            breakpoints=tuple(self.breakpoints),
            segments=dm.make_segments([s.model_dump() for s in self.segments]),
        )


DistributionSpec = Annotated[
    Union[
        Uniform01Spec,
        NormalSpec,
        StudentTSpec,
        FiniteSupportSpec,
        BernoulliSpec,
        PowerCrossSpec,
        PowerTangentSpec,
        EmpiricalSpec,
        PiecewiseQuantileSpec,
    ],
    Field(discriminator="kind"),
]

_adapter: TypeAdapter[Any] = TypeAdapter(DistributionSpec)


def parse_distribution(raw: Dict[str, Any] | Any) -> Any:
    """Validate a JSON object into one of the DistributionSpec variants."""
    if isinstance(raw, BaseModel):
        return raw
    try:
        return _adapter.validate_python(raw)
    except ValueError as exc:
        raise InvalidInputError(f"invalid distribution spec: {exc}") from exc
