"""
Contact points between quantile functions.

A contact point t0 is a fixed point of F_G (or of G_F), or a level where F_G
jumps across the identity. Regular points carry one-sided expansions
Delta(h) = F_G(t0 + h) - t0 - h = C |h|^r + o(|h|^r) whose exponents and
constants are estimated on a dyadic ladder of h.
"""
import logging
import math
from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from galtonrank.core.config import settings
from galtonrank.core.errors import (
    InvalidInputError,
    LocallyFlatError,
    OrderExceedsError,
    ScanBudgetExceeded,
)
from galtonrank.distmodel import (
    cumulative_grid,
    is_finite_pair,
    transform_FG,
    transform_FG_array,
    transform_FG_right,
)
from galtonrank.galton import (
    END_OFFSET,
    bisect_edge,
    flat_edge,
    grid_states,
    refine_crossing,
    split_band,
    zero_runs,
)
from galtonrank.models.contact import (
    VIRTUAL_CONSTANTS,
    ContactClass,
    ContactPoint,
    ContactPosition,
    ContactScan,
    ContactSource,
    IntensityEstimate,
    Side,
    SmoothContactInfo,
)
from galtonrank.models.distribution import Distribution

logger = logging.getLogger(__name__)

SNAP_STEP = 0.125
SNAP_FLOOR = 0.05
DEDUP_TOL = 1e-8
# |Delta| at or below this multiple of machine epsilon (relative to t) is rounding noise
NOISE_ULPS = 64
# local minima of |t - F_G(t)| below this level are refined as tangency candidates
TANGENCY_LEVEL = 1e-6

_SWAP = {
    ContactClass.CROSSING: ContactClass.CROSSING,
    ContactClass.TANGENCY: ContactClass.TANGENCY,
    ContactClass.UPPER_TANGENCY: ContactClass.LOWER_TANGENCY,
    ContactClass.LOWER_TANGENCY: ContactClass.UPPER_TANGENCY,
    ContactClass.VIRTUAL_HORIZONTAL_CROSSING: ContactClass.VIRTUAL_VERTICAL_CROSSING,
    ContactClass.VIRTUAL_VERTICAL_CROSSING: ContactClass.VIRTUAL_HORIZONTAL_CROSSING,
}


class FiniteClasses(NamedTuple):
    """Horizontal crossings, vertical crossings, upper and lower tangencies."""

    H: Tuple[Fraction, ...]
    V: Tuple[Fraction, ...]
    U: Tuple[Fraction, ...]
    L: Tuple[Fraction, ...]

    def as_dict(self) -> Dict[str, List[str]]:
        return {name: [f"{t.numerator}/{t.denominator}" for t in getattr(self, name)] for name in self._fields}

    def is_empty(self) -> bool:
        return not any(self)


def swap_contact_class(cls: ContactClass) -> ContactClass:
    """Label of the same point when the roles of F and G are exchanged."""
    return _SWAP[cls]


# ---------------------------------------------------------------------------
# Finite support
# ---------------------------------------------------------------------------

def classify_finite_support(F: Distribution, G: Distribution) -> FiniteClasses:
    """
    Exact classification over the shared cumulative grid.

    F_G equals P_i on (Q_{i-1}, Q_i], so at each inner level t0 both F_G(t0)
    and F_G(t0+) are read off the grid:
      H: F_G(t0) = t0 = F_G(t0+)     U: F_G(t0) = t0 < F_G(t0+)
      V: F_G(t0) < t0 < F_G(t0+)     L: F_G(t0) < t0 = F_G(t0+)
    """
    grid = cumulative_grid(F, G)
    P, Q = grid.P, grid.Q
    H, V, U, L = [], [], [], []
    for t0 in grid.inner_levels:
        at = P[bisect_left(Q, t0)]
        right = P[bisect_right(Q, t0)]
        if at == t0:
            (H if right == t0 else U).append(t0)
        elif at < t0:
            if right > t0:
                V.append(t0)
            elif right == t0:
                L.append(t0)
    return FiniteClasses(tuple(H), tuple(V), tuple(U), tuple(L))


def _finite_contacts(F: Distribution, G: Distribution) -> List[ContactPoint]:
    classes = classify_finite_support(F, G)
    labels = (
        (classes.H, ContactClass.VIRTUAL_HORIZONTAL_CROSSING),
        (classes.V, ContactClass.VIRTUAL_VERTICAL_CROSSING),
        (classes.U, ContactClass.UPPER_TANGENCY),
        (classes.L, ContactClass.LOWER_TANGENCY),
    )
    points = [_virtual_point(float(t0), cls, exact=t0) for levels, cls in labels for t0 in levels]
    return sorted(points, key=lambda p: p.t0)


def _virtual_point(
    t0: float,
    cls: ContactClass,
    source: ContactSource = ContactSource.VIA_FG,
    exact: Optional[Fraction] = None,
) -> ContactPoint:
    c_l, c_r = VIRTUAL_CONSTANTS[cls]
    return ContactPoint(
        t0=t0,
        position=ContactPosition.INNER,
        contact_class=cls,
        source=source,
        r_L=1.0,
        r_R=1.0,
        C_L=c_l,
        C_R=c_r,
        exact_t0=f"{exact.numerator}/{exact.denominator}" if exact is not None else None,
    )


# ---------------------------------------------------------------------------
# Intensity estimation
# ---------------------------------------------------------------------------

def default_eta(t0: float) -> float:
    if t0 <= 0.0 or t0 >= 1.0:
        return 0.1
    return min(0.1, t0 / 2.0, (1.0 - t0) / 2.0)


def _snap(r: float, stderr: float) -> Optional[float]:
    candidate = max(1.0, round(r / SNAP_STEP) * SNAP_STEP)
    if abs(candidate - r) <= max(2.0 * stderr, SNAP_FLOOR):
        return candidate
    return None


def estimate_intensity(
    F: Distribution,
    G: Distribution,
    t0: float,
    side: Side | str,
    eta: Optional[float] = None,
) -> IntensityEstimate:
    """
    Fit log|Delta(h_j)| = log|C| + r log h_j over h_j = eta * 2**-j.

    Returns:
        IntensityEstimate: slope r, signed constant C, slope standard error and
        the snapped order (nearest multiple of 1/8 above 1 within tolerance)

    Raises:
        LocallyFlatError: Delta is rounding noise on (almost) the whole ladder
    """
    side = Side(side)
    eta = eta if eta is not None else default_eta(t0)
    if eta <= 0:
        raise InvalidInputError("eta must be positive", {"eta": eta})
    hs = eta * 2.0 ** -np.asarray(list(settings.intensity_ladder), dtype=float)
    direction = 1.0 if side is Side.RIGHT else -1.0
    t = t0 + direction * hs
    if np.any((t <= 0.0) | (t >= 1.0)):
        raise InvalidInputError("step ladder leaves (0, 1)", {"t0": t0, "eta": eta, "side": side.value})
    delta = transform_FG_array(F, G, t) - t

    floor = NOISE_ULPS * np.finfo(float).eps * max(1.0, abs(t0))
    kept = np.abs(delta) > floor
    if np.count_nonzero(kept) < 3:
        raise LocallyFlatError(
            f"Delta vanishes on the step ladder at t0={t0:.6g} ({side.value})",
            {"t0": t0, "side": side.value, "eta": eta},
        )
    fit = stats.linregress(np.log(hs[kept]), np.log(np.abs(delta[kept])))
    sign = 1.0 if np.count_nonzero(delta[kept] > 0) * 2 >= np.count_nonzero(kept) else -1.0
    r_hat = float(fit.slope)
    stderr = float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    return IntensityEstimate(
        side=side,
        r=r_hat,
        C=sign * float(math.exp(fit.intercept)),
        stderr=stderr,
        eta=float(eta),
        snapped_r=_snap(r_hat, stderr),
        steps=tuple(float(h) for h in hs[kept]),
    )


def _is_lipschitz(est: IntensityEstimate) -> bool:
    return est.r >= 1.0 - settings.LIPSCHITZ_TOL


def _sides_for(t0: float) -> Tuple[Side, ...]:
    if t0 <= 0.0:
        return (Side.RIGHT,)
    if t0 >= 1.0:
        return (Side.LEFT,)
    return (Side.LEFT, Side.RIGHT)


def _expand(
    F: Distribution, G: Distribution, t0: float, eta: Optional[float]
) -> Dict[Side, Optional[IntensityEstimate]]:
    """One-sided expansions; a side where Delta is rounding noise maps to None."""
    estimates: Dict[Side, Optional[IntensityEstimate]] = {}
    for side in _sides_for(t0):
        try:
            estimates[side] = estimate_intensity(F, G, t0, side, eta)
        except LocallyFlatError:
            logger.debug("locally flat side", extra={"t0": t0, "side": side.value})
            estimates[side] = None
    return estimates


def _regular_point(
    F: Distribution,
    G: Distribution,
    t0: float,
    eta: Optional[float] = None,
    source: ContactSource = ContactSource.VIA_FG,
) -> Optional[ContactPoint]:
    """
    Expand a strict contact on both sides; swap to G_F when F_G is not Lipschitz there.

    A locally flat side is kept out of the expansion and listed in `flat_sides`;
    the point is dropped only when no side can be estimated.
    """
    estimates = _expand(F, G, t0, eta)
    if all(e is None for e in estimates.values()):
        return None
    if not all(_is_lipschitz(e) for e in estimates.values() if e is not None):
        swapped = _expand(G, F, t0, eta)
        if any(e is not None for e in swapped.values()):
            logger.debug("role swap", extra={"t0": t0})
            estimates = swapped
            source = ContactSource.VIA_GF if source is ContactSource.VIA_FG else ContactSource.VIA_FG

    left, right = estimates.get(Side.LEFT), estimates.get(Side.RIGHT)
    flat_sides = tuple(side.value for side, est in estimates.items() if est is None)
    extremal = t0 <= 0.0 or t0 >= 1.0
    if extremal or left is None or right is None:
        cls = ContactClass.TANGENCY
    else:
        cls = ContactClass.CROSSING if np.sign(left.C) != np.sign(right.C) else ContactClass.TANGENCY
    ambiguous = False
    if left is not None and right is not None and left.snapped_r != right.snapped_r:
        ambiguous = abs(left.r - right.r) < math.hypot(left.stderr, right.stderr)
    return ContactPoint(
        t0=float(t0),
        position=ContactPosition.EXTREMAL if extremal else ContactPosition.INNER,
        contact_class=cls,
        source=source,
        r_L=left.committed_r if left else None,
        r_R=right.committed_r if right else None,
        C_L=left.C if left else None,
        C_R=right.C if right else None,
        ambiguous_order=ambiguous,
        flat_sides=flat_sides,
        provenance={
            side.value: est.as_dict() if est is not None else {"side": side.value, "locally_flat": True}
            for side, est in estimates.items()
        },
    )


# ---------------------------------------------------------------------------
# Scanning
# ---------------------------------------------------------------------------

def _bisect(pred_sign: Callable[[float], float], a: float, b: float, sign_a: float) -> Tuple[float, float]:
    """Shrink [a, b] around a sign change of pred_sign; stops early on an exact zero."""
    while b - a > settings.BISECT_TOL:
        mid = 0.5 * (a + b)
        s = pred_sign(mid)
        if s == 0.0:
            return mid, mid
        if s == sign_a:
            a = mid
        else:
            b = mid
    return a, b


class _Scanner:
    """Sign scan of d(t) = t - F_G(t) on a uniform grid."""

    def __init__(self, F: Distribution, G: Distribution, cells: int):
        self.F, self.G = F, G
        self.grid = np.linspace(0.0, 1.0, cells + 1)
        self.nodes = self.grid.copy()
        self.nodes[0], self.nodes[-1] = END_OFFSET, 1.0 - END_OFFSET
        self.d = self.nodes - transform_FG_array(F, G, self.nodes)
        self.zero = np.abs(self.d) <= settings.SIGN_TOL
        self.sign = np.where(self.zero, 0.0, np.sign(self.d))
        self.state, self.band = grid_states(self.d, self.grid)

    def d_at(self, t: float) -> float:
        return float(t - transform_FG_array(self.F, self.G, np.array([t]))[0])

    def sign_at(self, t: float) -> float:
        value = self.d_at(t)
        return 0.0 if abs(value) <= settings.SIGN_TOL else math.copysign(1.0, value)

    def flat_segments(self) -> List[Tuple[float, float]]:
        segments = []
        last = len(self.grid) - 1
        for i, j in zero_runs(self.state):
            if self.band[i]:
                continue
            lo = 0.0 if i == 0 else flat_edge(self.F, self.G, float(self.nodes[i - 1]), float(self.nodes[i]))
            hi = 1.0 if j == last else flat_edge(self.F, self.G, float(self.nodes[j + 1]), float(self.nodes[j]))
            segments.append((lo, hi))
        return segments

    def brackets(self) -> List[Tuple[int, int]]:
        """Node index pairs around sign changes: adjacent opposite signs or a crossing band."""
        adjacent = np.flatnonzero(self.sign[:-1] * self.sign[1:] < 0)
        pairs = [(int(i), int(i) + 1) for i in adjacent]
        pairs.extend((i - 1, j + 1) for i, j in zero_runs(self.state) if self.band[i])
        return sorted(pairs)

    def touches(self) -> List[float]:
        """Roots inside short zero runs whose neighbours share a sign."""
        last = len(self.grid) - 1
        found = []
        for i, j in zero_runs(self.sign):
            if i == 0 or j == last or self.state[i] == 0:
                continue
            found.append(self._touch(float(self.nodes[i - 1]), float(self.nodes[j + 1])))
        return found

    def _touch(self, a: float, b: float) -> float:
        res = optimize.minimize_scalar(
            lambda t: abs(self.d_at(t)),
            bounds=(a, b),
            method="bounded",
            options={"xatol": settings.BISECT_TOL},
        )
        mid = float(res.x)
        if self.d_at(mid) != 0.0:
            return mid
        sign_a = math.copysign(1.0, self.d_at(a))
        _, first_zero = bisect_edge(self.F, self.G, a, mid, lambda g: g * sign_a > 0)
        last_zero, _ = bisect_edge(self.F, self.G, mid, b, lambda g: g * sign_a <= 0)
        return split_band(self.F, self.G, first_zero, last_zero)

    def tangency_candidates(self) -> List[float]:
        absd = np.abs(self.d)
        inner = np.arange(1, len(absd) - 1)
        is_min = (
            (absd[inner] < absd[inner - 1])
            & (absd[inner] <= absd[inner + 1])
            & (absd[inner] <= TANGENCY_LEVEL)
            & ~self.zero[inner]
            & (self.sign[inner - 1] == self.sign[inner + 1])
        )
        found = []
        for i in inner[is_min]:
            res = optimize.minimize_scalar(
                lambda t: abs(self.d_at(t)),
                bounds=(float(self.nodes[i - 1]), float(self.nodes[i + 1])),
                method="bounded",
                options={"xatol": settings.BISECT_TOL},
            )
            if res.fun <= 100 * settings.SIGN_TOL:
                found.append(float(res.x))
        return found


def _snap_to_levels(t: float, levels: Sequence[float]) -> float:
    for level in levels:
        if abs(float(level) - t) <= 1e-9:
            return float(level)
    return t


def _classify_jump(F: Distribution, G: Distribution, t0: float) -> Optional[ContactClass]:
    """Virtual class at a level where F_G may jump, from F_G(t0) and F_G(t0+)."""
    tol = settings.SIGN_TOL
    at = float(transform_FG(F, G, t0))
    right = float(transform_FG_right(F, G, t0))
    if right - at <= settings.JUMP_THRESHOLD:
        return None
    if abs(at - t0) <= tol and right > t0 + tol:
        return ContactClass.UPPER_TANGENCY
    if at < t0 - tol and right > t0 + tol:
        return ContactClass.VIRTUAL_VERTICAL_CROSSING
    if at < t0 - tol and abs(right - t0) <= tol:
        return ContactClass.LOWER_TANGENCY
    return None


def _is_locally_constant(F: Distribution, G: Distribution, t0: float) -> bool:
    """
    F_G identically t0 around t0: a horizontal (virtual) crossing.

    The transform must sit within rounding noise of t0 on both sides, and the
    plateau needs a cause: F^{-1} jumps at t0 or G^{-1} is flat across it.
    """
    h = np.array([-1e-6, -1e-7, 1e-7, 1e-6]) * max(min(t0, 1.0 - t0), 1e-3)
    values = transform_FG_array(F, G, t0 + h)
    floor = NOISE_ULPS * np.finfo(float).eps * max(1.0, abs(t0))
    if not np.all(np.abs(values - t0) <= floor):
        return False
    if any(abs(float(level) - t0) <= 1e-9 for level in F.quantile_jumps()):
        return True
    ends = G.ppf(t0 + h[[0, -1]])
    return bool(ends[0] == ends[1])


def _scan_transform(
    F: Distribution,
    G: Distribution,
    cells: int,
    budget: int,
    source: ContactSource,
) -> Tuple[List[ContactPoint], List[Tuple[float, float]]]:
    scanner = _Scanner(F, G, cells)
    flats = scanner.flat_segments()
    jump_levels = [float(t) for t in G.quantile_jumps()]
    flat_levels = [float(t) for t in F.quantile_jumps()]

    raw: List[Tuple[float, Optional[ContactClass]]] = []
    for i, j in scanner.brackets():
        lo_t, hi_t = float(scanner.nodes[i]), float(scanner.nodes[j])
        a, b = _bisect(scanner.sign_at, lo_t, hi_t, float(scanner.sign[i]))
        t0 = 0.5 * (a + b)
        jump = float(transform_FG_array(F, G, np.array([b]))[0] - transform_FG_array(F, G, np.array([a]))[0]) - (b - a)
        if jump > settings.JUMP_THRESHOLD:
            t0 = _snap_to_levels(t0, jump_levels)
            raw.append((t0, _classify_jump(F, G, t0)))
        else:
            t0 = refine_crossing(F, G, lo_t, hi_t)
            raw.append((_snap_to_levels(t0, flat_levels), None))
    raw.extend((t0, None) for t0 in scanner.touches())
    raw.extend((t0, None) for t0 in scanner.tangency_candidates())
    raw.extend((t0, _classify_jump(F, G, t0)) for t0 in jump_levels)
    raw.extend((t0, None) for t0 in flat_levels if _is_locally_constant(F, G, t0))

    if len(raw) > budget:
        t_bad = sorted(t for t, _ in raw)[budget]
        cell = min(int(t_bad * cells), cells - 1)
        raise ScanBudgetExceeded((float(scanner.grid[cell]), float(scanner.grid[cell + 1])), budget)

    points: List[ContactPoint] = []
    for t0, cls in sorted(raw, key=lambda item: item[0]):
        if any(abs(p.t0 - t0) <= DEDUP_TOL for p in points):
            continue
        if any(lo - DEDUP_TOL <= t0 <= hi + DEDUP_TOL for lo, hi in flats):
            continue
        if cls is not None:
            points.append(_virtual_point(t0, cls, source))
        elif _is_locally_constant(F, G, t0):
            points.append(_virtual_point(t0, ContactClass.VIRTUAL_HORIZONTAL_CROSSING, source))
        else:
            point = _regular_point(F, G, t0, source=source)
            if point is not None:
                points.append(point)
    return points, flats


def _extremal_points(F: Distribution, G: Distribution, flats: Sequence[Tuple[float, float]]) -> List[ContactPoint]:
    points = []
    for end in (0.0, 1.0):
        if any(lo - DEDUP_TOL <= end <= hi + DEDUP_TOL for lo, hi in flats):
            continue
        f_end, g_end = float(F.quantile(end)), float(G.quantile(end))
        touching = f_end == g_end or (math.isfinite(f_end) and abs(f_end - g_end) <= 1e-12)
        if not touching:
            continue
        point = _regular_point(F, G, end)
        if point is not None:
            points.append(point)
    return points


def scan_contact_set(
    F: Distribution,
    G: Distribution,
    budget: Optional[int] = None,
    cells: Optional[int] = None,
) -> ContactScan:
    """
    Contact points of F_G and G_F, flat segments of the fixed-point set and its measure.

    Raises:
        ScanBudgetExceeded: more candidates than the budget allows
    """
    budget = budget or settings.CONTACT_BUDGET
    cells = cells or settings.SCAN_CELLS
    if is_finite_pair(F, G):
        return ContactScan(points=tuple(_finite_contacts(F, G)), flat_segments=(), fixed_point_measure=0.0, cells=0)

    points, flats = _scan_transform(F, G, cells, budget, ContactSource.VIA_FG)
    swapped, _ = _scan_transform(G, F, cells, budget, ContactSource.VIA_GF)
    for point in swapped:
        if any(abs(p.t0 - point.t0) <= DEDUP_TOL for p in points):
            continue
        if point.contact_class.is_virtual:
            point = _virtual_point(point.t0, swap_contact_class(point.contact_class), ContactSource.VIA_GF)
        points.append(point)
    points.extend(_extremal_points(F, G, flats))
    if len(points) > budget:
        raise ScanBudgetExceeded((0.0, 1.0), budget)
    if flats:
        logger.warning("fixed-point set has positive measure", extra={"segments": flats})
    return ContactScan(
        points=tuple(sorted(points, key=lambda p: p.t0)),
        flat_segments=tuple(flats),
        fixed_point_measure=float(sum(hi - lo for lo, hi in flats)),
        cells=cells,
    )


def find_contacts(F: Distribution, G: Distribution, budget: Optional[int] = None) -> List[ContactPoint]:
    """All (generalized) contact points, deduplicated and labelled."""
    return list(scan_contact_set(F, G, budget).points)


def analyze_contacts(
    F: Distribution,
    G: Distribution,
    t0: Optional[float] = None,
    eta: Optional[float] = None,
) -> List[ContactPoint]:
    """Contacts with intensity provenance; restricted to t0 when given."""
    if t0 is None:
        return find_contacts(F, G)
    if not 0.0 <= t0 <= 1.0:
        raise InvalidInputError("t0 must lie in [0, 1]", {"t0": t0})
    if is_finite_pair(F, G):
        return [p for p in find_contacts(F, G) if abs(p.t0 - t0) <= DEDUP_TOL]
    if 0.0 < t0 < 1.0:
        cls = _classify_jump(F, G, t0)
        if cls is not None:
            return [_virtual_point(t0, cls)]
        if _is_locally_constant(F, G, t0):
            return [_virtual_point(t0, ContactClass.VIRTUAL_HORIZONTAL_CROSSING)]
    point = _regular_point(F, G, t0, eta)
    return [point] if point is not None else []


# ---------------------------------------------------------------------------
# Smooth densities
# ---------------------------------------------------------------------------

def smooth_contact_constants(
    F: Distribution,
    G: Distribution,
    t0: float,
    kmax: int = 4,
    side: str = "right",
) -> SmoothContactInfo:
    """
    Order k and h^{(k)}(t0) for h = F_G - id from the densities at x0 = F^{-1}(t0):
    f(x0)/g(x0) - 1 when k = 1, (f^{(k-1)}(x0) - g^{(k-1)}(x0)) / f(x0)^k when k > 1.

    Raises:
        OrderExceedsError: every candidate up to kmax is below tolerance
    """
    x0 = float(F.quantile(t0))
    f0, g0 = F.density(x0), G.density(x0)
    if f0 is None or g0 is None or not f0 > 0 or not g0 > 0:
        raise InvalidInputError("positive densities are required at x0", {"x0": x0})
    tol = settings.DERIVATIVE_TOL * f0
    if abs(f0 - g0) > tol:
        return SmoothContactInfo(k=1, h_derivative=f0 / g0 - 1.0, x0=x0, t0=t0)
    for k in range(2, kmax + 1):
        df = F.density_derivative(x0, k - 1, side)
        dg = G.density_derivative(x0, k - 1, side)
        if df is None or dg is None:
            break
        if abs(df - dg) > tol:
            return SmoothContactInfo(k=k, h_derivative=(df - dg) / f0**k, x0=x0, t0=t0)
    raise OrderExceedsError(f"contact order exceeds kmax={kmax}", {"t0": t0, "x0": x0})


def smooth_limit_constants(info: SmoothContactInfo) -> Tuple[int, float, float]:
    """(r, C_L, C_R) implied by a smooth contact of order k."""
    c = info.h_derivative / math.factorial(info.k)
    if info.k % 2:
        return info.k, -c, c
    return info.k, c, c
