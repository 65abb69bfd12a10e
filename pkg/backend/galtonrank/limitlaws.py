"""
Samplers for the limit laws of the dominance index.

Every public sampler takes `size`: None returns one float, an integer returns
an array of independent draws. Draws are pure functions of (arguments, seed).
"""
import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from galtonrank.core.config import settings
from galtonrank.core.errors import HorizonError, InvalidInputError
from galtonrank.core.seeding import SeedLike, make_rng
from galtonrank.models.contact import (
    ContactClass,
    ContactPoint,
    ContactPosition,
    ContactSource,
    SmoothContactInfo,
)
from galtonrank.models.limits import (
    BridgePath,
    ExtremalT,
    FiniteSupportSum,
    GlobalSum,
    InnerT,
    LimitLaw,
    OccupationOnSet,
    SmoothSum,
    VirtualT,
    check_lambda,
)

logger = logging.getLogger(__name__)

Intervals = Sequence[Tuple[float, float]]

# paths generated at once when sampling occupation times
_PATH_BATCH = 256
# draws processed together by the r > 1 extremal sampler
_EXTREMAL_BATCH = 32


def _out(values: np.ndarray, size: Optional[int]):
    return float(values[0]) if size is None else values


def _count(size: Optional[int]) -> int:
    if size is None:
        return 1
    if size < 1:
        raise InvalidInputError("size must be positive", {"size": size})
    return int(size)


def _check_t0(t0: float) -> float:
    if not 0.0 < t0 < 1.0:
        raise InvalidInputError("t0 must lie in (0, 1)", {"t0": t0})
    return float(t0)


def _check_power(r: float, C: float) -> None:
    if r < 1.0:
        raise InvalidInputError("contact order must be at least 1", {"r": r})
    if C == 0:
        raise InvalidInputError("contact constant must be nonzero", {"C": C})


# ---------------------------------------------------------------------------
# Bridges
# ---------------------------------------------------------------------------

def _bridges(rng: np.random.Generator, N: int, paths: int) -> np.ndarray:  # noqa: N803
    steps = rng.normal(0.0, math.sqrt(1.0 / N), size=(paths, N))
    W = np.zeros((paths, N + 1))
    np.cumsum(steps, axis=1, out=W[:, 1:])
    t = np.linspace(0.0, 1.0, N + 1)
    B = W - t * W[:, -1:]
    B[:, -1] = 0.0
    return B


def sample_bridge(N: Optional[int] = None, seed: SeedLike = None, paths: Optional[int] = None) -> BridgePath:  # noqa: N803
    """Brownian bridge B(t) = W(t) - t W(1) on {0, 1/N, ..., 1}."""
    N = N or settings.BRIDGE_GRID
    if N < 2 or N & (N - 1):
        raise InvalidInputError("grid size must be a power of two >= 2", {"N": N})
    values = _bridges(make_rng(seed), N, _count(paths))
    return BridgePath(values=values[0] if paths is None else values)


def _cell_weights(N: int, intervals: Intervals) -> np.ndarray:  # noqa: N803
    """Length of A inside each cell [k/N, (k+1)/N)."""
    edges = np.linspace(0.0, 1.0, N + 1)
    weights = np.zeros(N)
    for lo, hi in intervals:
        if not 0.0 <= lo <= hi <= 1.0:
            raise InvalidInputError("intervals must lie in [0, 1]", {"interval": [lo, hi]})
        weights += np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None)
    return weights


def occupation_positive(path: BridgePath, intervals: Intervals):
    """l{t in A: B(t) > 0}, indicator read at the left end of each grid cell."""
    weights = _cell_weights(path.N, intervals)
    positive = path.values[..., :-1] > 0.0
    return positive @ weights if positive.ndim > 1 else float(positive @ weights)


def sample_occupation(
    intervals: Intervals,
    size: Optional[int] = None,
    seed: SeedLike = None,
    N: Optional[int] = None,  # noqa: N803
):
    N = N or settings.BRIDGE_GRID
    rng = make_rng(seed)
    weights = _cell_weights(N, intervals)
    total = _count(size)
    out = np.empty(total)
    for start in range(0, total, _PATH_BATCH):
        count = min(_PATH_BATCH, total - start)
        out[start:start + count] = (_bridges(rng, N, count)[:, :-1] > 0.0) @ weights
    return _out(out, size)


def sample_bridge_values(points: Sequence[float], size: Optional[int] = None, seed: SeedLike = None) -> np.ndarray:
    """
    Exact joint draws of a standard bridge at finitely many points.

    Returns:
        np.ndarray: shape (size, len(points)), columns in the order given
    """
    rng = make_rng(seed)
    pts = np.asarray([float(p) for p in points], dtype=float)
    if pts.size and (pts.min() < 0.0 or pts.max() > 1.0):
        raise InvalidInputError("bridge points must lie in [0, 1]", {"points": pts.tolist()})
    count = _count(size)
    order = np.argsort(pts)
    grid = np.concatenate(([0.0], pts[order], [1.0]))
    increments = rng.normal(size=(count, grid.size - 1)) * np.sqrt(np.diff(grid))
    W = np.cumsum(increments, axis=1)
    sorted_values = W[:, :-1] - pts[order] * W[:, -1:]
    values = np.empty_like(sorted_values)
    values[:, order] = sorted_values
    return values


def _bridge_pair(points: Sequence[float], count: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    return sample_bridge_values(points, count, rng), sample_bridge_values(points, count, rng)


# ---------------------------------------------------------------------------
# Inner contacts
# ---------------------------------------------------------------------------

def _part(value: np.ndarray, C: float) -> np.ndarray:  # noqa: N803
    """a^{sgn(C)}: positive part when C > 0, negative part when C < 0."""
    return np.maximum(value, 0.0) if C > 0 else np.maximum(-value, 0.0)


def _inner_from_bridges(
    B1: np.ndarray,  # noqa: N803
    B2: np.ndarray,  # noqa: N803
    lam: float,
    r_L: Optional[float],  # noqa: N803
    r_R: Optional[float],  # noqa: N803
    C_L: Optional[float],  # noqa: N803
    C_R: Optional[float],  # noqa: N803
    swapped: bool = False,
) -> np.ndarray:
    """Inner-contact term from the two bridges; a side without an expansion adds nothing."""
    if swapped:
        return -_inner_from_bridges(B2, B1, 1.0 - lam, r_L, r_R, C_L, C_R)
    B_lam = B1 / math.sqrt(lam) - B2 / math.sqrt(1.0 - lam)
    sides = [(r, C) for r, C in ((r_L, C_L), (r_R, C_R)) if r is not None and C is not None]
    r0 = max(r for r, _ in sides)
    if r0 == 1.0 and len(sides) == 2 and C_L * C_R < 0:
        return (
            _part(B_lam, C_L) / C_L
            + _part(B_lam, C_R) / C_R
            + math.copysign(1.0, C_L) * B2 / math.sqrt(1.0 - lam)
        )
    total = np.zeros_like(B_lam)
    for r, C in sides:
        if r == r0:
            total += math.copysign(1.0, C) * (_part(B_lam, C) / abs(C)) ** (1.0 / r0)
    return total


def sample_T_inner(  # noqa: N802
    t0: float,
    r_L: float,  # noqa: N803
    r_R: float,  # noqa: N803
    C_L: float,  # noqa: N803
    C_R: float,  # noqa: N803
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
    swapped: bool = False,
):
    """
    Limit of the localized statistic at a regular inner contact.

    With swapped=True the contact was expanded through G_F: the law is the
    negated one for (1 - lam) with the two bridges exchanged.
    """
    t0, lam = _check_t0(t0), check_lambda(lam)
    _check_power(r_L, C_L)
    _check_power(r_R, C_R)
    rng = make_rng(seed)
    sd = math.sqrt(t0 * (1.0 - t0))
    count = _count(size)
    B1, B2 = rng.normal(0.0, sd, count), rng.normal(0.0, sd, count)
    return _out(_inner_from_bridges(B1, B2, lam, r_L, r_R, C_L, C_R, swapped), size)


# ---------------------------------------------------------------------------
# Extremal contacts
# ---------------------------------------------------------------------------

def _power_horizon(r: float, a: float) -> float:
    """Smallest Y with a Y^r >= 8 sqrt(Y)."""
    return (8.0 / a) ** (1.0 / (r - 0.5))


def _occupation_above_power(rng: np.random.Generator, count: int, r: float, a: float) -> np.ndarray:
    """l{y > 0: W(y) > a y^r} on a doubled horizon, extended while late hits occur."""
    steps = 2 ** settings.EXTREMAL_STEP_EXPONENT
    horizon = 2.0 * _power_horizon(r, a)
    delta = horizon / steps
    y = np.arange(steps) * delta
    W = np.zeros((count, steps + 1))
    np.cumsum(rng.normal(0.0, math.sqrt(delta), size=(count, steps)), axis=1, out=W[:, 1:])
    # indicator at the left end of each step
    hits = W[:, :-1] > a * y**r
    values = delta * hits.sum(axis=1)

    for row in np.flatnonzero(hits[:, steps // 2:].any(axis=1)):
        level, start, extensions = W[row, -1], steps, 0
        late = True
        while late:
            if extensions >= settings.EXTREMAL_MAX_EXTENSIONS:
                raise HorizonError(
                    "extremal horizon not certified",
                    {"r": r, "a": a, "horizon": start * delta, "extensions": extensions},
                )
            # next segment covers [start, 2 start) in units of delta
            path = level + np.cumsum(rng.normal(0.0, math.sqrt(delta), size=start))
            left = np.concatenate(([level], path[:-1]))
            new_hits = left > a * ((start + np.arange(start)) * delta) ** r
            values[row] += delta * np.count_nonzero(new_hits)
            late = bool(new_hits[start // 2:].any())
            level, start, extensions = path[-1], 2 * start, extensions + 1
    return values


def renewal_occupation(
    xi1: np.ndarray,
    xi2: np.ndarray,
    lam: float,
    C: float,  # noqa: N803
    horizon: float,
) -> Tuple[float, float]:
    """
    sgn(C) lam (1-lam) times the measure of {y in (0, horizon]:
    sgn(C) lam S2_ceil((1-lam) y) > sgn(C) (1-lam)(1+C) S1_ceil(lam y)}.

    The ceilings are constant between breakpoints {j/lam} U {j/(1-lam)}, so the
    integral is an exact sum over cells.

    Returns:
        (value, last_active): the signed integral and the right end of the last active cell
    """
    s = 1.0 if C > 0 else -1.0
    bp1 = np.arange(1, math.floor(lam * horizon) + 1) / lam
    bp2 = np.arange(1, math.floor((1.0 - lam) * horizon) + 1) / (1.0 - lam)
    ends = np.union1d(np.union1d(bp1, bp2), [horizon])
    ends = ends[(ends > 0) & (ends <= horizon)]
    starts = np.concatenate(([0.0], ends[:-1]))
    k1 = np.searchsorted(bp1, ends, side="left") + 1
    k2 = np.searchsorted(bp2, ends, side="left") + 1
    S1, S2 = np.cumsum(xi1), np.cumsum(xi2)
    if k1.max() > S1.size or k2.max() > S2.size:
        raise InvalidInputError(
            "renewal sequences are too short for the horizon",
            {"horizon": horizon, "need": [int(k1.max()), int(k2.max())], "have": [S1.size, S2.size]},
        )
    active = s * lam * S2[k2 - 1] > s * (1.0 - lam) * (1.0 + C) * S1[k1 - 1]
    value = s * lam * (1.0 - lam) * float((ends - starts)[active].sum())
    last_active = float(ends[active][-1]) if active.any() else 0.0
    return value, last_active


def _renewal_draw(rng: np.random.Generator, lam: float, C: float) -> float:  # noqa: N803
    var = lam**2 * (1.0 - lam) + (1.0 - lam) ** 2 * (1.0 + C) ** 2 * lam
    horizon0 = 64.0 * var / (C**2 * lam**2 * (1.0 - lam) ** 2)
    tail = settings.RENEWAL_TAIL_STEPS / min(lam, 1.0 - lam)
    horizon = horizon0 + tail
    xi1 = np.empty(0)
    xi2 = np.empty(0)
    while True:
        need1, need2 = math.ceil(lam * horizon) + 1, math.ceil((1.0 - lam) * horizon) + 1
        if max(need1, need2) > settings.RENEWAL_MAX_STEPS:
            raise HorizonError(
                "renewal horizon exceeds the step cap",
                {"lambda": lam, "C": C, "horizon": horizon, "cap": settings.RENEWAL_MAX_STEPS},
            )
        # extend, keeping the sequences drawn so far
        xi1 = np.concatenate((xi1, rng.exponential(1.0, max(0, need1 - xi1.size))))
        xi2 = np.concatenate((xi2, rng.exponential(1.0, max(0, need2 - xi2.size))))
        value, last = renewal_occupation(xi1, xi2, lam, C, horizon)
        if max(horizon0, last) + tail <= horizon:
            return value
        horizon = max(2.0 * horizon, max(horizon0, last) + tail)


def sample_T_extremal(  # noqa: N802
    end: int,
    r: float,
    C: float,  # noqa: N803
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
    swapped: bool = False,
):
    """
    Limit at an extremal contact (t0 = 0 or 1).

    r > 1: sgn(C) l{y: sgn(C) W(y) > sqrt(lam (1-lam)) |C| y^r}.
    r = 1: the renewal integral; identically 0 when C <= -1.
    The law does not depend on the end; `end` is validated and recorded only.
    """
    if end not in (0, 1):
        raise InvalidInputError("end must be 0 or 1", {"end": end})
    lam = check_lambda(lam)
    _check_power(r, C)
    if swapped:
        lam = 1.0 - lam
    rng = make_rng(seed)
    count = _count(size)
    sign = (-1.0 if swapped else 1.0) * math.copysign(1.0, C)

    if r == 1.0:
        if C <= -1.0:
            return _out(np.zeros(count), size)
        draws = np.array([_renewal_draw(rng, lam, C) for _ in range(count)])
        # renewal_occupation already carries sgn(C)
        return _out(draws * (-1.0 if swapped else 1.0), size)

    a = math.sqrt(lam * (1.0 - lam)) * abs(C)
    out = np.empty(count)
    for start in range(0, count, _EXTREMAL_BATCH):
        batch = min(_EXTREMAL_BATCH, count - start)
        out[start:start + batch] = _occupation_above_power(rng, batch, r, a)
    return _out(sign * out, size)


# ---------------------------------------------------------------------------
# Virtual contacts
# ---------------------------------------------------------------------------

def _virtual_from_bridges(cls: ContactClass, B1: np.ndarray, B2: np.ndarray, lam: float) -> np.ndarray:  # noqa: N803
    first, second = B1 / math.sqrt(lam), B2 / math.sqrt(1.0 - lam)
    if cls is ContactClass.VIRTUAL_HORIZONTAL_CROSSING:
        return first
    if cls is ContactClass.VIRTUAL_VERTICAL_CROSSING:
        return -second
    if cls is ContactClass.UPPER_TANGENCY:
        return np.maximum(first - second, 0.0)
    if cls is ContactClass.LOWER_TANGENCY:
        return -np.maximum(second - first, 0.0)
    raise InvalidInputError(f"{cls.value} is not a virtual class")


def sample_virtual(
    contact_class: ContactClass | str,
    t0: float,
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
):
    cls = ContactClass(contact_class)
    t0, lam = _check_t0(t0), check_lambda(lam)
    rng = make_rng(seed)
    sd = math.sqrt(t0 * (1.0 - t0))
    count = _count(size)
    B1, B2 = rng.normal(0.0, sd, count), rng.normal(0.0, sd, count)
    return _out(_virtual_from_bridges(cls, B1, B2, lam), size)


# ---------------------------------------------------------------------------
# Global sums
# ---------------------------------------------------------------------------

def maximal_terms(contacts: Iterable[ContactPoint]) -> List[ContactPoint]:
    """Contacts whose effective order equals the maximum."""
    contacts = list(contacts)
    if not contacts:
        return []
    r0 = max(c.effective_order for c in contacts)
    return [c for c in contacts if abs(c.effective_order - r0) <= 1e-9]


def _extremal_args(point: ContactPoint) -> Tuple[float, float]:
    if point.end == 0:
        return point.r_R, point.C_R
    return point.r_L, point.C_L


def sample_global_limit(
    contacts: Sequence[ContactPoint],
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
):
    """
    Sum of the limits of all maximal-order contacts.

    Inner and virtual terms share one draw of (B1, B2) evaluated jointly at
    their points; each extremal end gets an independent driver.
    """
    lam = check_lambda(lam)
    count = _count(size)
    terms = maximal_terms(contacts)
    if not terms:
        logger.warning("empty maximal contact set; limit is 0")
        return _out(np.zeros(count), size)

    rng = make_rng(seed)
    total = np.zeros(count)
    inner = [c for c in terms if c.position is ContactPosition.INNER]
    if inner:
        B1, B2 = _bridge_pair([c.t0 for c in inner], count, rng)
        for i, c in enumerate(inner):
            if c.contact_class.is_virtual:
                total += _virtual_from_bridges(c.contact_class, B1[:, i], B2[:, i], lam)
            else:
                total += _inner_from_bridges(
                    B1[:, i], B2[:, i], lam, c.r_L, c.r_R, c.C_L, c.C_R,
                    swapped=c.source is ContactSource.VIA_GF,
                )
    for c in terms:
        if c.position is ContactPosition.EXTREMAL:
            r, C = _extremal_args(c)  # noqa: N806
            total += sample_T_extremal(c.end, r, C, lam, rng, count, swapped=c.source is ContactSource.VIA_GF)
    return _out(total, size)


def sample_finite_support_limit(
    H: Sequence[Fraction],  # noqa: N803
    V: Sequence[Fraction],  # noqa: N803
    U: Sequence[Fraction],  # noqa: N803
    L: Sequence[Fraction],  # noqa: N803
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
    harmonic: bool = False,
):
    """
    Limit of sqrt(n+m)(gamma_hat - gamma) for finitely supported F and G.

    harmonic=True gives the law for the sqrt(nm/(n+m)) scaling: every term is
    multiplied by sqrt(lam (1-lam)).
    """
    lam = check_lambda(lam)
    count = _count(size)
    groups = [[float(t) for t in group] for group in (H, V, U, L)]
    points = [t for group in groups for t in group]
    if not points:
        return _out(np.zeros(count), size)
    rng = make_rng(seed)
    B1, B2 = _bridge_pair(points, count, rng)
    labels = (
        ContactClass.VIRTUAL_HORIZONTAL_CROSSING,
        ContactClass.VIRTUAL_VERTICAL_CROSSING,
        ContactClass.UPPER_TANGENCY,
        ContactClass.LOWER_TANGENCY,
    )
    total = np.zeros(count)
    column = 0
    for group, cls in zip(groups, labels):
        for _ in group:
            total += _virtual_from_bridges(cls, B1[:, column], B2[:, column], lam)
            column += 1
    if harmonic:
        total *= math.sqrt(lam * (1.0 - lam))
    return _out(total, size)


# ---------------------------------------------------------------------------
# Smooth densities
# ---------------------------------------------------------------------------

def _smooth_from_bridges(info: SmoothContactInfo, B1: np.ndarray, B2: np.ndarray, lam: float) -> np.ndarray:  # noqa: N803
    k, h = info.k, info.h_derivative
    if h == 0:
        raise InvalidInputError("h^(k)(t0) must be nonzero", {"k": k})
    if k == 1:
        return math.copysign(1.0, h) * (B1 / (math.sqrt(lam) * h) + (1.0 + 1.0 / h) * B2 / math.sqrt(1.0 - lam))
    B_lam = B1 / math.sqrt(lam) - B2 / math.sqrt(1.0 - lam)
    scale = (math.factorial(k) / abs(h)) ** (1.0 / k)
    if k % 2:
        return scale * (np.maximum(B_lam, 0.0) ** (1.0 / k) - np.maximum(-B_lam, 0.0) ** (1.0 / k))
    return math.copysign(2.0 * scale, h) * _part(B_lam, h) ** (1.0 / k)


def sample_smooth_limit(
    info: SmoothContactInfo,
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
):
    """Closed-form limit at a contact of order k between smooth densities."""
    lam, t0 = check_lambda(lam), _check_t0(info.t0)
    rng = make_rng(seed)
    sd = math.sqrt(t0 * (1.0 - t0))
    count = _count(size)
    B1, B2 = rng.normal(0.0, sd, count), rng.normal(0.0, sd, count)
    return _out(_smooth_from_bridges(info, B1, B2, lam), size)


def sample_smooth_global_limit(
    contacts: Sequence[SmoothContactInfo],
    lam: float,
    seed: SeedLike = None,
    size: Optional[int] = None,
):
    """
    Sum over contacts of maximal order k0 with one shared bridge pair.

    For k0 = 1 each term is g/|f-g| B1/sqrt(lam) + f/|f-g| B2/sqrt(1-lam) at
    x_i = F^{-1}(t_i), which is the order-one form written with h' = f/g - 1.
    """
    lam = check_lambda(lam)
    count = _count(size)
    if not contacts:
        logger.warning("no smooth contacts; limit is 0")
        return _out(np.zeros(count), size)
    k0 = max(c.k for c in contacts)
    terms = [c for c in contacts if c.k == k0]
    rng = make_rng(seed)
    B1, B2 = _bridge_pair([_check_t0(c.t0) for c in terms], count, rng)
    total = np.zeros(count)
    for i, c in enumerate(terms):
        if k0 == 1:
            h = c.h_derivative
            total += B1[:, i] / (math.sqrt(lam) * abs(h)) + (1.0 + h) / abs(h) * B2[:, i] / math.sqrt(1.0 - lam)
        else:
            total += _smooth_from_bridges(c, B1[:, i], B2[:, i], lam)
    return _out(total, size)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def sample_limit(spec: LimitLaw, size: Optional[int] = None, seed: SeedLike = None):
    """Draw from any limit-law specification."""
    if isinstance(spec, OccupationOnSet):
        return sample_occupation(spec.intervals, size, seed, spec.grid)
    if isinstance(spec, InnerT):
        return sample_T_inner(spec.t0, spec.r_L, spec.r_R, spec.C_L, spec.C_R, spec.lam, seed, size, spec.swapped)
    if isinstance(spec, ExtremalT):
        return sample_T_extremal(spec.end, spec.r, spec.C, spec.lam, seed, size, spec.swapped)
    if isinstance(spec, VirtualT):
        return sample_virtual(spec.contact_class, spec.t0, spec.lam, seed, size)
    if isinstance(spec, GlobalSum):
        return sample_global_limit(spec.terms, spec.lam, seed, size)
    if isinstance(spec, FiniteSupportSum):
        return sample_finite_support_limit(spec.H, spec.V, spec.U, spec.L, spec.lam, seed, size, spec.harmonic)
    if isinstance(spec, SmoothSum):
        return sample_smooth_global_limit(spec.contacts, spec.lam, seed, size)
    raise InvalidInputError(f"unknown limit specification {type(spec).__name__}")
