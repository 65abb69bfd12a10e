"""
Brute-force ground truth, written independently of the fast paths it checks.
"""
import logging
from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Sequence

from galtonrank.core.config import settings
from galtonrank.core.errors import InvalidInputError
from galtonrank.distmodel import as_finite, shared_grid
from galtonrank.models.distribution import Distribution

logger = logging.getLogger(__name__)


def enumerate_galton_distribution(n: int) -> List[Fraction]:
    """
    Exact pmf of the rank order count for two continuous samples of size n.

    Each lattice path (positions of the X values among the 2n pooled ranks) is
    equally likely; the count is evaluated on ranks directly.
    """
    if not 1 <= n <= settings.ENUMERATION_MAX_N:
        raise InvalidInputError(
            f"enumeration supports 1 <= n <= {settings.ENUMERATION_MAX_N}", {"n": n}
        )
    counts: Counter = Counter()
    pooled = range(2 * n)
    for x_ranks in combinations(pooled, n):
        chosen = set(x_ranks)
        y_ranks = [r for r in pooled if r not in chosen]
        counts[sum(1 for xr, yr in zip(x_ranks, y_ranks) if xr > yr)] += 1
    total = comb(2 * n, n)
    return [Fraction(counts[k], total) for k in range(n + 1)]


def exact_index_finite(F: Distribution, G: Distribution) -> Fraction:
    """Sweep of the merged cumulative levels comparing the two step quantiles on each cell."""
    f, g = shared_grid(F, G)
    levels = sorted({Fraction(0), *f.levels, *g.levels})
    total = Fraction(0)
    for a, b in zip(levels, levels[1:]):
        # both quantiles are constant on (a, b]; evaluate at the right end
        if f.quantile(b) > g.quantile(b):
            total += b - a
    return total


def equality_measure_finite(F: Distribution, G: Distribution) -> Fraction:
    f, g = shared_grid(F, G)
    levels = sorted({Fraction(0), *f.levels, *g.levels})
    return sum((b - a for a, b in zip(levels, levels[1:]) if f.quantile(b) == g.quantile(b)), Fraction(0))


def brute_measure(xs: Sequence[float], ys: Sequence[float], cells: int) -> Fraction:
    """Midpoint rule for {F_n^{-1} > G_m^{-1}}; exact when cells is a multiple of lcm(n, m)."""
    if not xs or not ys:
        raise InvalidInputError("samples must be non-empty")
    if cells < 1:
        raise InvalidInputError("cells must be positive", {"cells": cells})
    x, y = sorted(xs), sorted(ys)
    n, m = len(x), len(y)
    hits = 0
    for k in range(cells):
        # midpoint (2k+1)/(2 cells); rank = ceil(size * midpoint)
        rank_x = -((-n * (2 * k + 1)) // (2 * cells))
        rank_y = -((-m * (2 * k + 1)) // (2 * cells))
        if x[rank_x - 1] > y[rank_y - 1]:
            hits += 1
    return Fraction(hits, cells)


def grid_index(F: Distribution, G: Distribution, cells: int) -> Fraction:
    """Rational-grid midpoint evaluation of gamma(F, G) for finite-support laws."""
    f, g = as_finite(F), as_finite(G)
    hits = 0
    for k in range(cells):
        t = Fraction(2 * k + 1, 2 * cells)
        if f.quantile(t) > g.quantile(t):
            hits += 1
    return Fraction(hits, cells)


def brute_classify_finite(F: Distribution, G: Distribution) -> Dict[str, List[Fraction]]:
    """
    Contact classes by direct evaluation of F(G^{-1}(.)) at and just right of each level.

    The right limit is read at t0 + eps with eps below every gap between levels,
    where the step function is already constant.
    """
    f, g = as_finite(F), as_finite(G)
    levels = sorted({lvl for lvl in (*f.levels, *g.levels) if 0 < lvl < 1})
    everything = sorted({Fraction(0), Fraction(1), *levels})
    gaps = [b - a for a, b in zip(everything, everything[1:]) if b > a]
    eps = min(gaps) / 4 if gaps else Fraction(1, 4)
    out: Dict[str, List[Fraction]] = {"H": [], "V": [], "U": [], "L": []}
    for t0 in levels:
        at = f.cdf(g.quantile(t0))
        right = f.cdf(g.quantile(t0 + eps))
        if at == t0 and right == t0:
            out["H"].append(t0)
        elif at == t0 and right > t0:
            out["U"].append(t0)
        elif at < t0 < right:
            out["V"].append(t0)
        elif at < t0 and right == t0:
            out["L"].append(t0)
    return out


def brute_pair_summary(F: Distribution, G: Distribution) -> Dict[str, str]:
    """Exact index, reverse index and equality measure as "p/q" strings."""
    forward = exact_index_finite(F, G)
    backward = exact_index_finite(G, F)
    ties = equality_measure_finite(F, G)
    return {
        "gamma": f"{forward.numerator}/{forward.denominator}",
        "gamma_reverse": f"{backward.numerator}/{backward.denominator}",
        "equality_measure": f"{ties.numerator}/{ties.denominator}",
    }
