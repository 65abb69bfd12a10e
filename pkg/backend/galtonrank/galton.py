"""
Galton's rank order statistic and the dominance index.

Empirical quantities are exact: both step quantiles are constant on the cells
of the merged grid {i/n} U {j/m}, so every measure is an integer multiple of
1/lcm(n, m).
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from galtonrank.core.config import settings
from galtonrank.core.errors import InvalidInputError, ScanBudgetExceeded
from galtonrank.distmodel import is_finite_pair, shared_grid, transform_FG_array
from galtonrank.models.distribution import Distribution, Real
from galtonrank.models.measure import IndexReport, exact_measure

logger = logging.getLogger(__name__)

# Interior nodes replacing the grid ends 0 and 1, where quantiles may be infinite.
END_OFFSET = 1e-12
# Distance, in band widths, at which the local power law around a rounding band is read.
BAND_REACH = 32.0


def _sorted_sample(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"sample {name} must be a non-empty list of reals")
    return arr


@lru_cache(maxsize=64)
def _merged_cells(n: int, m: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, int]:
    """Cells (start, end] of the merged grid in units of 1/L plus the order-statistic index on each."""
    L = math.lcm(n, m)
    a, b = L // n, L // m
    ends = np.union1d(np.arange(1, n + 1, dtype=np.int64) * a, np.arange(1, m + 1, dtype=np.int64) * b)
    starts = np.concatenate(([0], ends[:-1]))
    ix = (ends + a - 1) // a - 1
    iy = (ends + b - 1) // b - 1
    for arr in (ends, starts, ix, iy):
        arr.setflags(write=False)
    return starts, ends, ix, iy, L


def galton_count(xs: Sequence[float], ys: Sequence[float]) -> int:
    """#{i: X_(i) > Y_(i)} for samples of equal size."""
    x = _sorted_sample(xs, "xs")
    y = _sorted_sample(ys, "ys")
    if x.size != y.size:
        raise InvalidInputError("galton count needs equal sample sizes", {"n": x.size, "m": y.size})
    return int(np.count_nonzero(x > y))


def empirical_index(xs: Sequence[float], ys: Sequence[float]) -> IndexReport:
    """
    Exact measure of {t: F_n^{-1}(t) > G_m^{-1}(t)} together with the tie measure.

    Args:
        xs: Sample from F, any order
        ys: Sample from G, any order

    Returns:
        IndexReport: gamma_hat, tie and reverse measures; galton_count when n = m
    """
    x = _sorted_sample(xs, "xs")
    y = _sorted_sample(ys, "ys")
    n, m = x.size, y.size
    starts, ends, ix, iy, L = _merged_cells(n, m)
    lengths = ends - starts
    xv, yv = x[ix], y[iy]
    above = int(lengths[xv > yv].sum())
    ties = int(lengths[xv == yv].sum())
    return IndexReport(
        gamma_hat=Fraction(above, L),
        tie_measure=Fraction(ties, L),
        reverse_measure=Fraction(L - above - ties, L),
        n=n,
        m=m,
        galton_count=int(np.count_nonzero(x > y)) if n == m else None,
    )


def empirical_window_measure(xs: Sequence[float], ys: Sequence[float], lo: Real, hi: Real) -> Fraction:
    """Exact measure of {F_n^{-1} > G_m^{-1}} intersected with (lo, hi)."""
    x = _sorted_sample(xs, "xs")
    y = _sorted_sample(ys, "ys")
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 <= lo <= hi <= 1:
        raise InvalidInputError("window must satisfy 0 <= lo <= hi <= 1", {"lo": float(lo), "hi": float(hi)})
    starts, ends, ix, iy, L = _merged_cells(x.size, y.size)
    above = x[ix] > y[iy]
    lo_units, hi_units = lo * L, hi * L
    inside = (starts >= math.ceil(lo_units)) & (ends <= math.floor(hi_units))
    total = Fraction(int((ends - starts)[inside & above].sum()))
    partial = np.flatnonzero(
        above & ~inside & (ends > math.floor(lo_units)) & (starts < math.ceil(hi_units))
    )
    for i in partial:
        overlap = min(Fraction(int(ends[i])), hi_units) - max(Fraction(int(starts[i])), lo_units)
        if overlap > 0:
            total += overlap
    return exact_measure(total / L)


def _finite_positive_measure(F: Distribution, G: Distribution, lo: Fraction, hi: Fraction) -> Fraction:
    """On (Q_{i-1}, Q_i] F_G equals P_i, so {t > F_G(t)} meets the cell in (max(Q_{i-1}, P_i), Q_i]."""
    f, g = shared_grid(F, G)
    total = Fraction(0)
    q_prev = Fraction(0)
    for p_i, q_i in zip(f.levels, g.levels):
        left = max(q_prev, p_i, lo)
        right = min(q_i, hi)
        if right > left:
            total += right - left
        q_prev = q_i
    return total


def _gap(F: Distribution, G: Distribution, t: float) -> float:
    return float(t - transform_FG_array(F, G, np.array([t]))[0])


def _abs_gap(F: Distribution, G: Distribution, t: np.ndarray) -> np.ndarray:
    return np.abs(t - transform_FG_array(F, G, t))


def bisect_edge(
    F: Distribution, G: Distribution, a: float, b: float, inside: Callable[[float], bool]
) -> Tuple[float, float]:
    """Shrink (a, b] around the last point from a where inside(gap) still holds."""
    while b - a > settings.BISECT_TOL:
        mid = 0.5 * (a + b)
        if inside(_gap(F, G, mid)):
            a = mid
        else:
            b = mid
    return a, b


def split_band(F: Distribution, G: Distribution, a: float, b: float) -> float:
    """
    Root inside a band (a, b) where t - F_G(t) rounds to zero between two strict signs.

    Near the root |t - F_G(t)| grows like C_s |t - t0|^r on each side, and the band
    ends where it reaches the rounding threshold of each side, so
    (t0 - a) / (b - t0) = (eps_a C_b / (eps_b C_a))^(1/r). r and C_b / C_a are read
    from the gap at two distances outside the band; the midpoint is kept when the
    reads leave (0, 1) or the local fit is unusable.
    """
    width = b - a
    root = 0.5 * (a + b)
    reach = BAND_REACH * width
    if width <= 4.0 * settings.BISECT_TOL or root - 2.0 * reach <= 0.0 or root + 2.0 * reach >= 1.0:
        return root
    eps_a, eps_b = float(np.spacing(abs(a))), float(np.spacing(abs(b)))
    for _ in range(3):
        near = _abs_gap(F, G, np.array([root - reach, root + reach]))
        far = _abs_gap(F, G, np.array([root - 2.0 * reach, root + 2.0 * reach]))
        if not (np.all(np.isfinite(near)) and np.all(near > 0) and np.all(far > near)):
            return 0.5 * (a + b)
        r = float(np.mean(np.log2(far / near)))
        ratio = (eps_a * near[1] / (eps_b * near[0])) ** (1.0 / r)
        root = a + width * ratio / (1.0 + ratio)
    return root


def refine_crossing(F: Distribution, G: Distribution, a: float, b: float) -> float:
    """
    Root of t - F_G(t) between a and b, where the gap has strict opposite signs.

    Both edges of the rounding band are located on the raw sign; a band wider
    than the bisection tolerance is split by `split_band`.
    """
    if a > b:
        a, b = b, a
    sign_a = math.copysign(1.0, _gap(F, G, a))
    _, first_off = bisect_edge(F, G, a, b, lambda g: g * sign_a > 0)
    last_off, _ = bisect_edge(F, G, a, b, lambda g: g * sign_a >= 0)
    if last_off - first_off <= settings.BISECT_TOL:
        return 0.5 * (first_off + last_off)
    return split_band(F, G, first_off, last_off)


def flat_edge(F: Distribution, G: Distribution, outside: float, inside: float) -> float:
    """Boundary between a strict-sign node and a flat (|gap| <= SIGN_TOL) node."""
    a, b = outside, inside
    while abs(b - a) > settings.BISECT_TOL:
        mid = 0.5 * (a + b)
        if abs(_gap(F, G, mid)) > settings.SIGN_TOL:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def grid_states(gap: np.ndarray, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sign states of the gap on a scan grid.

    Values within SIGN_TOL are zero. A zero run narrower than FLAT_MIN_WIDTH is
    rounding around a single root: it takes the sign of its neighbours when they
    agree (or when it touches an end), and is flagged as a crossing band when they
    disagree. Wider zero runs are flat segments of the fixed-point set.
    """
    state = np.where(gap > settings.SIGN_TOL, 1, np.where(gap < -settings.SIGN_TOL, -1, 0)).astype(np.int8)
    band = np.zeros(state.shape, dtype=bool)
    last = len(state) - 1
    for i, j in zero_runs(state):
        if grid[j] - grid[i] >= settings.FLAT_MIN_WIDTH:
            continue
        left = int(state[i - 1]) if i > 0 else 0
        right = int(state[j + 1]) if j < last else 0
        if left and right and left != right:
            band[i : j + 1] = True
        elif left or right:
            state[i : j + 1] = left or right
    return state, band


def zero_runs(state: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal runs [i, j] of zero states."""
    padded = np.concatenate(([0], (state == 0).astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return [(int(s), int(e) - 1) for s, e in zip(edges[::2], edges[1::2])]


def _boundary(
    F: Distribution,
    G: Distribution,
    nodes: np.ndarray,
    state: np.ndarray,
    band: np.ndarray,
    inner: int,
    step: int,
) -> float:
    """Edge of the positive run ending at node index `inner`, looking in direction `step`."""
    nxt = inner + step
    if state[nxt] == -1:
        return refine_crossing(F, G, float(nodes[inner]), float(nodes[nxt]))
    if band[nxt]:
        far = nxt
        while band[far + step]:
            far += step
        return refine_crossing(F, G, float(nodes[inner]), float(nodes[far + step]))
    return flat_edge(F, G, float(nodes[inner]), float(nodes[nxt]))


def positive_intervals(
    F: Distribution,
    G: Distribution,
    lo: float = 0.0,
    hi: float = 1.0,
    cells: Optional[int] = None,
    budget: Optional[int] = None,
) -> List[Tuple[float, float]]:
    """
    Intervals of (lo, hi) where t > F_G(t), by sign scan plus root refinement.

    Raises:
        ScanBudgetExceeded: more boundaries than the budget allows
    """
    cells = cells or settings.SCAN_CELLS
    budget = budget or settings.CONTACT_BUDGET
    grid = np.linspace(lo, hi, cells + 1)
    nodes = grid.copy()
    nodes[0] = max(nodes[0], END_OFFSET)
    nodes[-1] = min(nodes[-1], 1.0 - END_OFFSET)
    state, band = grid_states(nodes - transform_FG_array(F, G, nodes), grid)

    positive = np.concatenate(([0], (state == 1).astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(positive))
    runs = [(int(s), int(e) - 1) for s, e in zip(edges[::2], edges[1::2])]
    boundaries = sum((i > 0) + (j < cells) for i, j in runs)
    if boundaries > budget:
        i, _ = runs[min(budget // 2, len(runs) - 1)]
        cell = max(i - 1, 0)
        raise ScanBudgetExceeded((float(grid[cell]), float(grid[cell + 1])), budget)
    logger.debug("sign scan", extra={"cells": cells, "boundaries": int(boundaries)})

    intervals: List[Tuple[float, float]] = []
    for i, j in runs:
        start = lo if i == 0 else _boundary(F, G, nodes, state, band, i, -1)
        end = hi if j == cells else _boundary(F, G, nodes, state, band, j, 1)
        intervals.append((start, end))
    return intervals


@lru_cache(maxsize=256)
def population_window_measure(F: Distribution, G: Distribution, lo: Real = 0, hi: Real = 1) -> Real:
    """Measure of {F^{-1} > G^{-1}} intersected with (lo, hi); exact for finite-support pairs."""
    if is_finite_pair(F, G):
        return _finite_positive_measure(F, G, Fraction(lo), Fraction(hi))
    return float(sum(b - a for a, b in positive_intervals(F, G, float(lo), float(hi))))


def population_index(F: Distribution, G: Distribution) -> Real:
    """gamma(F, G) = l{t: F^{-1}(t) > G^{-1}(t)} = l{t: t > F_G(t)}."""
    return population_window_measure(F, G, 0, 1)


def localized_deficiency(
    xs: Sequence[float],
    ys: Sequence[float],
    F: Distribution,
    G: Distribution,
    t0: float,
    eta: float,
    swap: bool = False,
) -> float:
    """
    Window statistic around a contact point t0.

    With swap=True the statistic is computed with the sample roles exchanged and
    negated, which agrees with the direct form whenever the window carries no ties.
    """
    lo, hi = Fraction(t0) - Fraction(eta), Fraction(t0) + Fraction(eta)
    if eta <= 0 or lo < 0 or hi > 1:
        raise InvalidInputError("window (t0 - eta, t0 + eta) must lie in [0, 1]", {"t0": t0, "eta": eta})
    if swap:
        reverse = empirical_window_measure(ys, xs, lo, hi)
        return -(float(reverse) - float(population_window_measure(G, F, lo, hi)))
    direct = empirical_window_measure(xs, ys, lo, hi)
    return float(direct) - float(population_window_measure(F, G, lo, hi))


def chung_feller_pvalue(count: int, n: int) -> Fraction:
    """P(count statistic <= count) = (count + 1)/(n + 1) under a continuous null with equal sizes."""
    if n < 1 or not 0 <= count <= n:
        raise InvalidInputError("count must lie in {0, ..., n}", {"count": count, "n": n})
    return Fraction(count + 1, n + 1)
