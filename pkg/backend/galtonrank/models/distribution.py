"""
Distribution models: immutable laws exposing a left-continuous quantile,
a right-continuous cdf and, when present, a density.

Finite-support laws keep atoms and probabilities as Fractions so that every
cumulative level and every composite value F(G^{-1}(t)) is exact.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import ClassVar, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite_e
from scipy import special

from galtonrank.core.errors import InvalidInputError

Real = float | Fraction

# Bisection depth for numerical cdf inversion; 2**-64 is below double resolution on [0, 1].
_INVERSION_STEPS = 64


def to_fraction(value: Real | int | str) -> Fraction:
    """Exact conversion; strings accept "3/8", "0.25" and integers."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


class Distribution(ABC):
    """Common interface of every law handled by the package."""

    kind: ClassVar[str] = "abstract"
    is_discrete: ClassVar[bool] = False

    @abstractmethod
    def quantile(self, t: Real) -> Real:
        """F^{-1}(t) = inf{x: t <= F(x)}; t in [0, 1], endpoints as one-sided limits."""

    def quantile_right(self, t: Real) -> Real:
        """Right limit F^{-1}(t+)."""
        return self.quantile(t)

    @abstractmethod
    def cdf(self, x: Real) -> Real:
        """Right-continuous distribution function."""

    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Vectorised left-continuous quantile."""
        return np.array([float(self.quantile(float(v))) for v in np.ravel(u)]).reshape(np.shape(u))

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return np.array([float(self.cdf(float(v))) for v in np.ravel(x)]).reshape(np.shape(x))

    def density(self, x: float) -> float | None:
        """Lebesgue density at x, None for laws without one."""
        return None

    def density_derivative(self, x: float, order: int, side: str = "right") -> float | None:
        """
        order-th derivative of the density at x.

        The default uses a one-sided polynomial fit through density values, which is
        what the piecewise models need at breakpoints.
        """
        if order == 0:
            return self.density(x)
        if self.density(x) is None:
            return None
        step = 1e-3 * max(1.0, abs(x))
        sign = 1.0 if side == "right" else -1.0
        offsets = sign * step * np.arange(0, order + 4, dtype=float)
        values = np.array([self.density(x + o) for o in offsets], dtype=float)
        coeffs = np.polynomial.polynomial.polyfit(offsets, values, order + 2)
        return float(math.factorial(order) * coeffs[order])

    def quantile_jumps(self) -> Tuple[Real, ...]:
        """Levels in (0, 1) where the quantile jumps."""
        return ()

    def support(self) -> Tuple[Real, Real]:
        return (self.quantile(0), self.quantile(1))

    def _invert_quantile(self, x: np.ndarray) -> np.ndarray:
        """F(x) = sup{t in [0,1]: Q(t) <= x} by vectorised bisection on t."""
        x = np.asarray(x, dtype=float)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        below = self.ppf(np.zeros(1))[0]
        above = self.ppf(np.ones(1))[0]
        for _ in range(_INVERSION_STEPS):
            mid = 0.5 * (lo + hi)
            ok = self.ppf(mid) <= x
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        out = lo
        out = np.where(x < below, 0.0, out)
        return np.where(x >= above, 1.0, out)


@dataclass(frozen=True)
class Uniform01(Distribution):
    """Standard uniform law on [0, 1]."""

    kind: ClassVar[str] = "uniform01"

    def quantile(self, t: Real) -> Real:
        return min(max(t, 0), 1)

    def cdf(self, x: Real) -> Real:
        return min(max(x, 0), 1)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(u, dtype=float), 0.0, 1.0)

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), 0.0, 1.0)

    def density(self, x: float) -> float | None:
        return 1.0 if 0.0 <= x <= 1.0 else 0.0

    def density_derivative(self, x: float, order: int, side: str = "right") -> float | None:
        return self.density(x) if order == 0 else 0.0


@dataclass(frozen=True)
class Normal(Distribution):
    """Normal(mu, sigma) through scipy.special.ndtr / ndtri."""

    kind: ClassVar[str] = "normal"
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise InvalidInputError("sigma must be positive", {"sigma": self.sigma})

    def quantile(self, t: Real) -> Real:
        return float(self.mu + self.sigma * special.ndtri(float(t)))

    def cdf(self, x: Real) -> Real:
        return float(special.ndtr((float(x) - self.mu) / self.sigma))

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.mu + self.sigma * special.ndtri(np.asarray(u, dtype=float))

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return special.ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def density(self, x: float) -> float | None:
        z = (x - self.mu) / self.sigma
        return math.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def density_derivative(self, x: float, order: int, side: str = "right") -> float | None:
        # d^k/dx^k phi(z)/sigma = (-1)^k He_k(z) phi(z) / sigma^(k+1)
        z = (x - self.mu) / self.sigma
        coeffs = np.zeros(order + 1)
        coeffs[order] = 1.0
        base = self.density(x) or 0.0
        return float((-1) ** order * hermite_e.hermeval(z, coeffs) * base / self.sigma**order)


@dataclass(frozen=True)
class StudentTShift(Distribution):
    """Student t with nu degrees of freedom shifted by mu; nu = 1 uses the exact Cauchy tails."""

    kind: ClassVar[str] = "student_t"
    nu: float = 1.0
    mu: float = 0.0

    def __post_init__(self) -> None:
        if not self.nu > 0:
            raise InvalidInputError("nu must be positive", {"nu": self.nu})

    def ppf(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.nu == 1.0:
            with np.errstate(divide="ignore"):
                lower = -1.0 / np.tan(np.pi * u)
                upper = 1.0 / np.tan(np.pi * (1.0 - u))
            return self.mu + np.where(u < 0.5, lower, upper)
        return self.mu + special.stdtrit(self.nu, u)

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        z = np.asarray(x, dtype=float) - self.mu
        if self.nu == 1.0:
            with np.errstate(divide="ignore"):
                lower = np.arctan(-1.0 / z) / np.pi
            return np.where(z < 0, lower, 0.5 + np.arctan(z) / np.pi)
        return special.stdtr(self.nu, z)

    def quantile(self, t: Real) -> Real:
        return float(self.ppf(np.array([float(t)]))[0])

    def cdf(self, x: Real) -> Real:
        return float(self.cdf_array(np.array([float(x)]))[0])

    def density(self, x: float) -> float | None:
        nu = self.nu
        z = x - self.mu
        log_norm = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
        return math.exp(log_norm - (nu + 1) / 2 * math.log1p(z * z / nu))


@dataclass(frozen=True)
class FiniteSupport(Distribution):
    """Law on finitely many atoms with exact rational probabilities."""

    kind: ClassVar[str] = "finite_support"
    is_discrete: ClassVar[bool] = True
    atoms: Tuple[Fraction, ...] = ()
    probs: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        atoms = tuple(to_fraction(a) for a in self.atoms)
        probs = tuple(to_fraction(p) for p in self.probs)
        if not atoms or len(atoms) != len(probs):
            raise InvalidInputError("atoms and probs must be non-empty and of equal length")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise InvalidInputError("atoms must be strictly increasing", {"atoms": [str(a) for a in atoms]})
        if any(p < 0 for p in probs):
            raise InvalidInputError("probabilities must be non-negative")
        if sum(probs) != 1:
            raise InvalidInputError("probabilities must sum to 1 exactly", {"sum": str(sum(probs))})
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @cached_property
    def levels(self) -> Tuple[Fraction, ...]:
        """Cumulative levels Q_1 <= ... <= Q_k = 1."""
        out, acc = [], Fraction(0)
        for p in self.probs:
            acc += p
            out.append(acc)
        return tuple(out)

    @cached_property
    def _float_levels(self) -> np.ndarray:
        return np.array([float(q) for q in self.levels])

    @cached_property
    def _float_atoms(self) -> np.ndarray:
        return np.array([float(a) for a in self.atoms])

    def quantile(self, t: Real) -> Real:
        if t <= 0:
            return self.atoms[bisect_right(self.levels, 0)]
        return self.atoms[min(bisect_left(self.levels, t), len(self.atoms) - 1)]

    def quantile_right(self, t: Real) -> Real:
        if t >= 1:
            return self.quantile(1)
        return self.atoms[bisect_right(self.levels, t)]

    def cdf(self, x: Real) -> Real:
        idx = bisect_right(self.atoms, x)
        return self.levels[idx - 1] if idx else Fraction(0)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._float_levels, np.asarray(u, dtype=float), side="left")
        return self._float_atoms[np.minimum(idx, len(self.atoms) - 1)]

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._float_atoms, np.asarray(x, dtype=float), side="right")
        padded = np.concatenate(([0.0], self._float_levels))
        return padded[idx]

    def quantile_jumps(self) -> Tuple[Real, ...]:
        positive = [q for q, p in zip(self.levels, self.probs) if p > 0]
        return tuple(q for q in positive[:-1] if 0 < q < 1)


def Bernoulli(p: Real | str) -> FiniteSupport:  # noqa: N802 - reads as a law constructor
    """Bernoulli(p) on atoms {0, 1}."""
    p = to_fraction(p)
    if not 0 <= p <= 1:
        raise InvalidInputError("Bernoulli parameter must lie in [0, 1]", {"p": str(p)})
    return FiniteSupport(atoms=(Fraction(0), Fraction(1)), probs=(1 - p, p))


@dataclass(frozen=True)
class Empirical(Distribution):
    """Empirical law of a sample; F^{-1}(t) = X_(ceil(n t))."""

    kind: ClassVar[str] = "empirical"
    is_discrete: ClassVar[bool] = True
    values: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.values:
            raise InvalidInputError("empirical law needs a non-empty sample")
        object.__setattr__(self, "values", tuple(sorted(float(v) for v in self.values)))

    @cached_property
    def as_finite(self) -> FiniteSupport:
        uniq, counts = np.unique(np.asarray(self.values), return_counts=True)
        n = len(self.values)
        return FiniteSupport(
            atoms=tuple(Fraction(float(v)) for v in uniq),
            probs=tuple(Fraction(int(c), n) for c in counts),
        )

    def quantile(self, t: Real) -> Real:
        return self.as_finite.quantile(t)

    def quantile_right(self, t: Real) -> Real:
        return self.as_finite.quantile_right(t)

    def cdf(self, x: Real) -> Real:
        return self.as_finite.cdf(x)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.as_finite.ppf(u)

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return self.as_finite.cdf_array(x)

    def quantile_jumps(self) -> Tuple[Real, ...]:
        return self.as_finite.quantile_jumps()


@dataclass(frozen=True)
class PowerCrossQuantile(Distribution):
    """F^{-1}(t) = 1/2 + sgn(t - 1/2)|t - 1/2|^r."""

    kind: ClassVar[str] = "power_cross"
    r: float = 1.0

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise InvalidInputError("r must be positive", {"r": self.r})

    def ppf(self, u: np.ndarray) -> np.ndarray:
        h = np.clip(np.asarray(u, dtype=float), 0.0, 1.0) - 0.5
        return 0.5 + np.sign(h) * np.abs(h) ** self.r

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        half = 0.5**self.r
        h = np.clip(np.asarray(x, dtype=float) - 0.5, -half, half)
        return 0.5 + np.sign(h) * np.abs(h) ** (1.0 / self.r)

    def quantile(self, t: Real) -> Real:
        return float(self.ppf(np.array([float(t)]))[0])

    def cdf(self, x: Real) -> Real:
        return float(self.cdf_array(np.array([float(x)]))[0])

    def density(self, x: float) -> float | None:
        h = abs(x - 0.5)
        if h > 0.5**self.r:
            return 0.0
        if h == 0:
            return math.inf if self.r > 1 else (0.0 if self.r < 1 else 1.0)
        return h ** (1.0 / self.r - 1.0) / self.r


@dataclass(frozen=True)
class PowerTangentQuantile(Distribution):
    """G^{-1}(t) = t + sgn(t - 1/2)|t - 1/2|^r; the cdf is obtained by inversion."""

    kind: ClassVar[str] = "power_tangent"
    r: float = 1.0

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise InvalidInputError("r must be positive", {"r": self.r})

    def ppf(self, u: np.ndarray) -> np.ndarray:
        t = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        h = t - 0.5
        return t + np.sign(h) * np.abs(h) ** self.r

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return self._invert_quantile(x)

    def quantile(self, t: Real) -> Real:
        return float(self.ppf(np.array([float(t)]))[0])

    def cdf(self, x: Real) -> Real:
        return float(self.cdf_array(np.array([float(x)]))[0])

    def density(self, x: float) -> float | None:
        lo, hi = self.support()
        if not lo <= x <= hi:
            return 0.0
        h = abs(self.cdf(x) - 0.5)
        if h > 0:
            slope = 1.0 + self.r * h ** (self.r - 1.0)
        elif self.r == 1:
            slope = 2.0
        else:
            slope = 1.0 if self.r > 1 else math.inf
        return 1.0 / slope


@dataclass(frozen=True)
class QuantileSegment:
    """Q(t) = c + slope (t - anchor) + scale * s(t - anchor) |t - anchor|^power.

    s(u) is sgn(u) when signed, 1 otherwise.
    """

    c: float = 0.0
    slope: float = 0.0
    scale: float = 0.0
    anchor: float = 0.0
    power: float = 1.0
    signed: bool = True

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        u = np.asarray(t, dtype=float) - self.anchor
        shape = np.sign(u) if self.signed else 1.0
        return self.c + self.slope * u + self.scale * shape * np.abs(u) ** self.power

    def derivative(self, t: float) -> float:
        """Right derivative dQ/dt at t."""
        u = t - self.anchor
        if u == 0:
            if self.power < 1:
                return math.inf if self.scale > 0 else self.slope
            shape = 1.0 if self.power == 1 else 0.0
        else:
            shape = self.power * abs(u) ** (self.power - 1.0)
            if not self.signed:
                shape *= math.copysign(1.0, u)
        return self.slope + self.scale * shape


@dataclass(frozen=True)
class PiecewiseQuantile(Distribution):
    """
    Quantile given by segments on (b_i, b_{i+1}], with 0 = b_0 < ... < b_k = 1.

    Only `breakpoints` strictly inside (0, 1) are stored; segment i covers the
    i-th cell. Monotonicity is checked on construction.
    """

    kind: ClassVar[str] = "piecewise_quantile"
    breakpoints: Tuple[float, ...] = ()
    segments: Tuple[QuantileSegment, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        bps = tuple(float(b) for b in self.breakpoints)
        segs = tuple(self.segments)
        if len(segs) != len(bps) + 1:
            raise InvalidInputError("need exactly one more segment than breakpoints")
        edges = (0.0, *bps, 1.0)
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise InvalidInputError("breakpoints must be strictly increasing inside (0, 1)")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "segments", segs)
        for seg, lo, hi in zip(segs, edges, edges[1:]):
            grid = np.linspace(lo, hi, 257)
            if np.any(np.diff(seg.evaluate(grid)) < -1e-12):
                raise InvalidInputError("segment is not nondecreasing", {"cell": [lo, hi]})
        for i, b in enumerate(bps):
            left = float(segs[i].evaluate(np.array([b]))[0])
            right = float(segs[i + 1].evaluate(np.array([b]))[0])
            if right < left - 1e-12:
                raise InvalidInputError("quantile decreases across breakpoint", {"breakpoint": b})

    def _segment_index(self, t: np.ndarray, side: str = "left") -> np.ndarray:
        return np.searchsorted(np.asarray(self.breakpoints), t, side=side)

    def _evaluate(self, t: np.ndarray, side: str) -> np.ndarray:
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        idx = self._segment_index(t, side)
        out = np.empty_like(t)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.evaluate(t[mask])
        return out

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self._evaluate(u, "left")

    def cdf_array(self, x: np.ndarray) -> np.ndarray:
        return self._invert_quantile(x)

    def quantile(self, t: Real) -> Real:
        return float(self.ppf(np.array([float(t)]))[0])

    def quantile_right(self, t: Real) -> Real:
        return float(self._evaluate(np.array([float(t)]), "right")[0])

    def cdf(self, x: Real) -> Real:
        return float(self.cdf_array(np.array([float(x)]))[0])

    def density(self, x: float) -> float | None:
        t = self.cdf(x)
        idx = int(self._segment_index(np.array([t]))[0])
        slope = self.segments[idx].derivative(t)
        return 0.0 if slope == math.inf else (1.0 / slope if slope > 0 else math.inf)

    def quantile_jumps(self) -> Tuple[Real, ...]:
        return tuple(b for b in self.breakpoints if self.quantile_right(b) > self.quantile(b) + 1e-15)


def make_segments(specs: Sequence[dict]) -> Tuple[QuantileSegment, ...]:
    return tuple(QuantileSegment(**spec) for spec in specs)
