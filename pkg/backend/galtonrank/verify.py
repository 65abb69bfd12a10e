"""
Monte Carlo harness for the limit theorems.

Replication k at size index i draws both samples from derive_seed(seed, i, k);
the limit reference sample uses its own stream. Workers receive fixed chunks
of replication indices and results are written back by index, so reports do
not depend on the number of workers.
"""
import hashlib
import json
import logging
import math
import time
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from galtonrank.contact import scan_contact_set
from galtonrank.core.config import settings
from galtonrank.core.errors import InvalidInputError
from galtonrank.core.seeding import SeedLike, derive_seed, make_rng
from galtonrank.distmodel import sample
from galtonrank.galton import empirical_index, empirical_window_measure, population_index, population_window_measure
from galtonrank.limitlaws import sample_limit
from galtonrank.models.distribution import Distribution
from galtonrank.models.limits import LimitLaw
from galtonrank.schemas.experiment import (
    ExperimentConfig,
    ExperimentReport,
    RateEstimate,
    ScaledSummary,
    SizeSummary,
)
from galtonrank.schemas.limit import parse_limit

logger = logging.getLogger(__name__)

# spawn-key branch reserved for limit reference samples
LIMIT_STREAM = 2**31
QUANTILE_LEVELS = (0.05, 0.25, 0.5, 0.75, 0.95)


def config_hash(payload: Dict[str, Any]) -> str:
    """sha256 of the canonical (sorted keys, compact) JSON form."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

def _nonempty(a: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidInputError(f"sample {name} is empty")
    return arr


def ks_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample sup-distance between empirical distribution functions."""
    return float(stats.ks_2samp(_nonempty(a, "a"), _nonempty(b, "b")).statistic)


def wasserstein1(a: Sequence[float], b: Sequence[float]) -> float:
    """L1 distance between the two empirical quantile functions."""
    return float(stats.wasserstein_distance(_nonempty(a, "a"), _nonempty(b, "b")))


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------

class _Job:
    """Picklable description of the work at one size."""

    def __init__(
        self,
        F: Distribution,  # noqa: N803
        G: Distribution,  # noqa: N803
        n: int,
        m: int,
        seed: int,
        size_index: int,
        statistic: str,
        centre: float,
        window: Optional[Tuple[Fraction, Fraction]] = None,
        swap: bool = False,
    ):
        self.F, self.G = F, G
        self.n, self.m = n, m
        self.seed, self.size_index = seed, size_index
        self.statistic = statistic
        self.centre = centre
        self.window = window
        self.swap = swap

    def replicate(self, rep: int) -> float:
        rng = make_rng(derive_seed(self.seed, self.size_index, rep))
        xs = sample(self.F, self.n, rng)
        ys = sample(self.G, self.m, rng)
        if self.statistic == "global":
            return float(empirical_index(xs, ys).gamma_hat) - self.centre
        lo, hi = self.window
        if self.swap:
            return -(float(empirical_window_measure(ys, xs, lo, hi)) - self.centre)
        return float(empirical_window_measure(xs, ys, lo, hi)) - self.centre


def _run_chunk(args: Tuple[_Job, int, int]) -> List[float]:
    job, start, stop = args
    return [job.replicate(rep) for rep in range(start, stop)]


def _run_job(job: _Job, reps: int, threads: int) -> np.ndarray:
    if threads <= 1 or reps < 2 * threads:
        return np.asarray(_run_chunk((job, 0, reps)))
    bounds = np.linspace(0, reps, 4 * threads + 1).astype(int)
    chunks = [(job, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with Pool(processes=threads) as pool:
        parts = pool.map(_run_chunk, chunks)
    return np.concatenate([np.asarray(p) for p in parts])


def _centre(cfg: ExperimentConfig, F: Distribution, G: Distribution) -> Tuple[float, Optional[Tuple[Fraction, Fraction]]]:  # noqa: N803
    if cfg.statistic == "global":
        return float(population_index(F, G)), None
    lo = Fraction(cfg.t0) - Fraction(cfg.eta)
    hi = Fraction(cfg.t0) + Fraction(cfg.eta)
    reference = population_window_measure(G, F, lo, hi) if cfg.swap else population_window_measure(F, G, lo, hi)
    return float(reference), (lo, hi)


def _job_for(cfg: ExperimentConfig, size_index: int) -> _Job:
    F, G = cfg.F.to_distribution(), cfg.G.to_distribution()  # noqa: N806
    centre, window = _centre(cfg, F, G)
    n, m = cfg.sizes[size_index]
    return _Job(F, G, n, m, cfg.seed, size_index, cfg.statistic, centre, window, cfg.swap)


def scale_factor(cfg: ExperimentConfig, n: int, m: int, exponent: Fraction) -> float:
    base = n + m if cfg.scaling_base == "sum" else n * m / (n + m)
    return float(base) ** float(exponent)


def raw_statistic_samples(cfg: ExperimentConfig, size_index: int, threads: Optional[int] = None) -> np.ndarray:
    """Unscaled draws of gamma_hat - gamma (or of the localized statistic) at one size."""
    if not 0 <= size_index < len(cfg.sizes):
        raise InvalidInputError("size index out of range", {"size_index": size_index})
    threads = threads or cfg.threads or settings.THREADS
    return _run_job(_job_for(cfg, size_index), cfg.reps, threads)


def scaled_statistic_samples(
    cfg: ExperimentConfig,
    size_index: int,
    exponent: Optional[Fraction] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Draws of base^s times the statistic; s defaults to the first configured scaling."""
    n, m = cfg.sizes[size_index]
    s = cfg.scalings[0] if exponent is None else Fraction(exponent)
    return scale_factor(cfg, n, m, s) * raw_statistic_samples(cfg, size_index, threads)


def limit_reference_sample(spec: LimitLaw | Dict[str, Any], reps: int, seed: SeedLike) -> np.ndarray:
    """Fresh draws from the limit law on the reserved limit stream of `seed`."""
    if isinstance(spec, dict):
        spec = parse_limit(spec).to_limit_spec()
    stream = derive_seed(seed, LIMIT_STREAM) if isinstance(seed, int) else seed
    return np.asarray(sample_limit(spec, reps, stream), dtype=float)


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------

def _iqr(values: np.ndarray, quantiles: Tuple[float, float] = (0.25, 0.75)) -> float:
    lo, hi = np.quantile(values, quantiles)
    return float(hi - lo)


def _check_ladder(totals: Sequence[int]) -> None:
    if len(totals) < settings.RATE_MIN_POINTS:
        raise InvalidInputError(
            f"rate regression needs at least {settings.RATE_MIN_POINTS} sizes", {"sizes": list(totals)}
        )
    decades = math.log10(max(totals) / min(totals))
    if decades < settings.RATE_MIN_DECADES:
        raise InvalidInputError(
            f"sizes must span at least {settings.RATE_MIN_DECADES} decades of n+m",
            {"sizes": list(totals), "decades": decades},
        )


def fit_rate(
    totals: Sequence[int],
    samples: Sequence[np.ndarray],
    quantiles: Tuple[float, float] = (0.25, 0.75),
) -> RateEstimate:
    """
    Slope of log IQR against log(n + m) with a 95% confidence interval.

    `quantiles` sets the inter-quantile range used as dispersion. A wider range
    reads the tails, which reach their scaling sooner than the centre when the
    limit law is bimodal. All-zero dispersion is reported as the exact regime
    instead of a slope.
    """
    iqrs = [_iqr(np.asarray(s), quantiles) for s in samples]
    points = list(zip((int(t) for t in totals), iqrs))
    usable = [(t, q) for t, q in points if q > 0]
    if len(usable) < 2:
        logger.warning("degenerate dispersion; exact regime", extra={"points": points})
        return RateEstimate(exact_regime=True, points=points, quantiles=quantiles)
    x = np.log([t for t, _ in usable])
    y = np.log([q for _, q in usable])
    fit = stats.linregress(x, y)
    dof = len(usable) - 2
    stderr = float(fit.stderr) if dof > 0 else float("nan")
    half = float(stats.t.ppf(0.975, dof)) * stderr if dof > 0 else float("nan")
    return RateEstimate(
        slope=float(fit.slope),
        stderr=stderr,
        ci_low=float(fit.slope) - half,
        ci_high=float(fit.slope) + half,
        intercept=float(fit.intercept),
        points=points,
        quantiles=quantiles,
    )


def estimate_rate(
    F: Distribution,  # noqa: N803
    G: Distribution,  # noqa: N803
    sizes: Sequence[Tuple[int, int]],
    reps: int,
    seed: int,
    threads: Optional[int] = None,
    quantiles: Tuple[float, float] = (0.25, 0.75),
) -> RateEstimate:
    """Rate slope of gamma_hat - gamma; about -1/(2 r0) for inner and -1/(2r - 1) for extremal contacts."""
    totals = [n + m for n, m in sizes]
    _check_ladder(totals)
    threads = threads or settings.THREADS
    gamma = float(population_index(F, G))
    samples = [
        _run_job(_Job(F, G, n, m, seed, i, "global", gamma), reps, threads)
        for i, (n, m) in enumerate(sizes)
    ]
    return fit_rate(totals, samples, quantiles)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------

def decomposition_residual(
    F: Distribution,  # noqa: N803
    G: Distribution,  # noqa: N803
    n: int,
    m: int,
    reps: int,
    seed: int,
) -> np.ndarray:
    """
    gamma_hat - gamma minus the empirical dominance measure over the fixed-point set of F_G.

    Only the flat part of the fixed-point set carries measure; for finite-support
    pairs it is empty and the residual is gamma_hat - gamma itself.
    """
    gamma = population_index(F, G)
    flats = scan_contact_set(F, G).flat_segments
    residuals = np.empty(reps)
    for rep in range(reps):
        rng = make_rng(derive_seed(seed, 0, rep))
        xs, ys = sample(F, n, rng), sample(G, m, rng)
        value = empirical_index(xs, ys).gamma_hat - Fraction(gamma)
        for lo, hi in flats:
            value -= empirical_window_measure(xs, ys, lo, hi)
        residuals[rep] = float(value)
    return residuals


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def _summarise(values: np.ndarray, exponent: Fraction, reference: Optional[np.ndarray], distance: str) -> ScaledSummary:
    quantiles = np.quantile(values, QUANTILE_LEVELS)
    summary = ScaledSummary(
        exponent=f"{exponent.numerator}/{exponent.denominator}",
        mean=float(values.mean()),
        sd=float(values.std(ddof=1)) if values.size > 1 else 0.0,
        quantiles={f"q{int(level * 100):02d}": float(q) for level, q in zip(QUANTILE_LEVELS, quantiles)},
    )
    if reference is not None:
        if distance in ("ks", "both"):
            summary.ks = ks_distance(values, reference)
        if distance in ("wasserstein1", "both"):
            summary.wasserstein1 = wasserstein1(values, reference)
    return summary


def run_convergence_experiment(
    cfg: ExperimentConfig,
    csv_dir: Optional[str] = None,
) -> ExperimentReport:
    """
    For each (n, m): reps draws of the scaled statistic, summaries under every
    configured exponent, distances to one fresh limit sample and the rate fit.
    """
    started = time.perf_counter()
    threads = cfg.threads or settings.THREADS
    F, G = cfg.F.to_distribution(), cfg.G.to_distribution()  # noqa: N806
    centre, _ = _centre(cfg, F, G)

    reference = None
    if cfg.limit is not None:
        reference = limit_reference_sample(cfg.limit.to_limit_spec(), cfg.limit_reps or cfg.reps, cfg.seed)

    summaries: List[SizeSummary] = []
    raws: List[np.ndarray] = []
    for i, (n, m) in enumerate(cfg.sizes):
        tick = time.perf_counter()
        raw = raw_statistic_samples(cfg, i, threads)
        raws.append(raw)
        scaled = [
            _summarise(scale_factor(cfg, n, m, s) * raw, s, reference, cfg.distance) for s in cfg.scalings
        ]
        elapsed = time.perf_counter() - tick
        summaries.append(
            SizeSummary(
                n=n,
                m=m,
                seed_path=[cfg.seed, i],
                zero_fraction=float(np.mean(raw == 0.0)),
                iqr=_iqr(raw),
                wall_time=elapsed,
                scaled=scaled,
            )
        )
        if csv_dir is not None:
            _dump_csv(csv_dir, f"size_{n}_{m}.csv", scale_factor(cfg, n, m, cfg.scalings[0]) * raw, cfg.seed)
        logger.info("size done", extra={"n": n, "m": m, "reps": cfg.reps, "seconds": round(elapsed, 3)})

    if csv_dir is not None and reference is not None:
        _dump_csv(csv_dir, "limit.csv", reference, cfg.seed)

    rate = None
    if cfg.rate:
        totals = [n + m for n, m in cfg.sizes]
        try:
            _check_ladder(totals)
            rate = fit_rate(totals, raws, cfg.rate_quantiles)
        except InvalidInputError as exc:
            logger.warning("rate fit skipped", extra={"reason": exc.message})

    monotone = None
    if reference is not None and len(summaries) > 1 and cfg.distance in ("ks", "both"):
        first, last = summaries[0].scaled[0].ks, summaries[-1].scaled[0].ks
        monotone = bool(last <= first)

    return ExperimentReport(
        config=cfg.canonical(),
        config_hash=config_hash(cfg.canonical()),
        seed=cfg.seed,
        population_value=centre,
        sizes=summaries,
        rate=rate,
        monotone_evidence=monotone,
        limit_seed_path=[cfg.seed, LIMIT_STREAM] if reference is not None else [],
        wall_clock=time.perf_counter() - started,
    )


def _dump_csv(directory: str, name: str, values: np.ndarray, seed: int) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / name, "w", encoding="utf-8") as fh:
        fh.write(f"# seed={seed}\n")
        fh.write("value\n")
        for v in values:
            fh.write(f"{v!r}\n")
