"""
Distribution operations: generalized inverses, the composite transform
F_G = F o G^{-1}, shared finite grids and inverse-transform sampling.
"""
import logging
from fractions import Fraction
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from galtonrank.core.errors import InvalidInputError
from galtonrank.core.seeding import SeedLike, make_rng
from galtonrank.models.distribution import Distribution, Empirical, FiniteSupport, Real
from galtonrank.models.measure import CumulativeGrid

logger = logging.getLogger(__name__)

_TINY = np.nextafter(0.0, 1.0)


def quantile(d: Distribution, t: Real) -> Real:
    """Left-continuous generalized inverse; t = 0, 1 give one-sided limits (possibly infinite)."""
    if not 0 <= t <= 1:
        raise InvalidInputError("probability outside [0, 1]", {"t": float(t)})
    return d.quantile(t)


def cdf(d: Distribution, x: Real) -> Real:
    return d.cdf(x)


def transform_FG(F: Distribution, G: Distribution, t: Real) -> Real:  # noqa: N802
    """F_G(t) = F(G^{-1}(t)); exact for finite-support pairs."""
    if not 0 <= t <= 1:
        raise InvalidInputError("probability outside [0, 1]", {"t": float(t)})
    return F.cdf(G.quantile(t))


def transform_FG_right(F: Distribution, G: Distribution, t: Real) -> Real:  # noqa: N802
    """Right limit F_G(t+) = F(G^{-1}(t+))."""
    if not 0 <= t <= 1:
        raise InvalidInputError("probability outside [0, 1]", {"t": float(t)})
    return F.cdf(G.quantile_right(t))


def transform_FG_array(F: Distribution, G: Distribution, t: np.ndarray) -> np.ndarray:  # noqa: N802
    """Vectorised float evaluation of F_G."""
    return F.cdf_array(G.ppf(np.asarray(t, dtype=float)))


def sample(d: Distribution, n: int, seed: SeedLike = None) -> np.ndarray:
    """Inverse-transform draws F^{-1}(U_i) from uniforms on (0, 1)."""
    if n < 1:
        raise InvalidInputError("sample size must be at least 1", {"n": n})
    rng = make_rng(seed)
    return d.ppf(rng.uniform(_TINY, 1.0, size=n))


def empirical_quantile(sorted_sample: Sequence[float], t: Real) -> float:
    """X_(ceil(n t)) for t in (0, 1]."""
    n = len(sorted_sample)
    if n == 0:
        raise InvalidInputError("empirical quantile of an empty sample")
    t = Fraction(t)
    if not 0 < t <= 1:
        raise InvalidInputError("probability outside (0, 1]", {"t": float(t)})
    rank = -((-n * t.numerator) // t.denominator)
    return sorted_sample[rank - 1]


def as_finite(d: Distribution) -> FiniteSupport:
    if isinstance(d, FiniteSupport):
        return d
    if isinstance(d, Empirical):
        return d.as_finite
    raise InvalidInputError(f"{d.kind} is not finitely supported")


def is_finite_pair(F: Distribution, G: Distribution) -> bool:
    return F.is_discrete and G.is_discrete


def shared_grid(F: Distribution, G: Distribution) -> Tuple[FiniteSupport, FiniteSupport]:
    """Re-express two finite laws on the union of their atoms (zero-padded)."""
    f, g = as_finite(F), as_finite(G)
    atoms = sorted(set(f.atoms) | set(g.atoms))

    def pad(d: FiniteSupport) -> Tuple[Fraction, ...]:
        mass = dict(zip(d.atoms, d.probs))
        return tuple(mass.get(a, Fraction(0)) for a in atoms)

    pf, pg = pad(f), pad(g)
    # atoms where both laws put no mass carry no information
    keep = [i for i in range(len(atoms)) if pf[i] + pg[i] > 0]
    atoms = [atoms[i] for i in keep]
    return (
        FiniteSupport(atoms=tuple(atoms), probs=tuple(pf[i] for i in keep)),
        FiniteSupport(atoms=tuple(atoms), probs=tuple(pg[i] for i in keep)),
    )


def cumulative_grid(F: Distribution, G: Distribution) -> CumulativeGrid:
    f, g = shared_grid(F, G)
    return CumulativeGrid(
        atoms=f.atoms,
        P=(Fraction(0), *f.levels),
        Q=(Fraction(0), *g.levels),
    )


def load_distribution(spec: Dict[str, Any] | Any) -> Distribution:
    """Build a Distribution from a JSON object such as {"kind": "bernoulli", "p": "1/2"}."""
    from galtonrank.schemas.distribution import parse_distribution

    return parse_distribution(spec).to_distribution()
