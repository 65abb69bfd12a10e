"""
Experiment configuration and report schemas for the verification harness.
"""
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from galtonrank.core.config import settings
from galtonrank.schemas.common import FractionField
from galtonrank.schemas.distribution import DistributionSpec
from galtonrank.schemas.limit import LimitLawSpec


def _default_sizes() -> List[Tuple[int, int]]:
    return [(n, n) for n in settings.DEFAULT_SIZES]


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one convergence experiment."""

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    name: Optional[str] = None
    F: DistributionSpec
    G: DistributionSpec
    sizes: List[Tuple[int, int]] = Field(default_factory=_default_sizes, min_length=1)
    reps: int = 1000
    scalings: List[FractionField] = Field(default_factory=lambda: [Fraction(1, 2)], min_length=1)
    scaling_base: Literal["sum", "harmonic"] = "sum"
    statistic: Literal["global", "localized"] = "global"
    t0: Optional[float] = None
    eta: Optional[float] = None
    swap: bool = False
    limit: Optional[LimitLawSpec] = None
    limit_reps: Optional[int] = None
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    distance: Literal["ks", "wasserstein1", "both"] = "both"
    threads: Optional[int] = Field(None, ge=1)
    rate: bool = True
    rate_quantiles: Tuple[float, float] = (0.25, 0.75)

    @field_validator("sizes")
    @classmethod
    def check_sizes(cls, v: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        for n, m in v:
            if n < 1 or m < 1:
                raise ValueError(f"sample sizes must be positive, got ({n}, {m})")
        return v

    @field_validator("rate_quantiles")
    @classmethod
    def check_rate_quantiles(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = v
        if not 0.0 < lo < hi < 1.0:
            raise ValueError(f"rate_quantiles must satisfy 0 < lo < hi < 1, got {v}")
        return v

    @field_validator("reps")
    @classmethod
    def check_reps(cls, v: int) -> int:
        if v < settings.MIN_REPS:
            raise ValueError(f"reps must be at least {settings.MIN_REPS}")
        return v

    @model_validator(mode="after")
    def check_window(self) -> "ExperimentConfig":
        if self.statistic == "localized":
            if self.t0 is None or self.eta is None:
                raise ValueError("the localized statistic needs t0 and eta")
            if self.eta <= 0 or self.t0 - self.eta < 0 or self.t0 + self.eta > 1:
                raise ValueError("window (t0 - eta, t0 + eta) must lie in [0, 1]")
        return self

    @property
    def lam(self) -> float:
        n, m = self.sizes[-1]
        return n / (n + m)

    def canonical(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


class ScaledSummary(BaseModel):
    """Summary of the draws under one scaling exponent."""

    exponent: str
    mean: float
    sd: float
    quantiles: Dict[str, float]
    ks: Optional[float] = None
    wasserstein1: Optional[float] = None


class SizeSummary(BaseModel):
    n: int
    m: int
    seed_path: List[int]
    zero_fraction: float
    iqr: float
    wall_time: float
    scaled: List[ScaledSummary]


class RateEstimate(BaseModel):
    """Regression of log IQR on log(n + m)."""

    exact_regime: bool = False
    slope: Optional[float] = None
    stderr: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    intercept: Optional[float] = None
    points: List[Tuple[int, float]] = []
    quantiles: Tuple[float, float] = (0.25, 0.75)


class ExperimentReport(BaseModel):
    config: Dict[str, Any]
    config_hash: str
    seed: int
    population_value: float
    sizes: List[SizeSummary]
    rate: Optional[RateEstimate] = None
    monotone_evidence: Optional[bool] = None
    limit_seed_path: List[int] = []
    wall_clock: float
