"""Configuración global para los tests de galton-rank-order."""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from galtonrank.core.config import settings
from galtonrank.models.distribution import (
    Bernoulli,
    FiniteSupport,
    PiecewiseQuantile,
    PowerCrossQuantile,
    PowerTangentQuantile,
    QuantileSegment,
    Uniform01,
)

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


@pytest.fixture(scope="session")
def config_dir():
    """Directorio con las configuraciones de reproducción."""
    return CONFIG_DIR


@pytest.fixture(scope="session")
def load_config_file():
    """Carga un fichero JSON de configs/ por nombre."""

    def _load(name: str) -> dict:
        return json.loads((CONFIG_DIR / name).read_text(encoding="utf-8"))

    return _load


@pytest.fixture
def rng():
    """Generador con semilla fija para cada test."""
    return np.random.default_rng(settings.DEFAULT_SEED)


@pytest.fixture(scope="session")
def uniform():
    """Ley uniforme en [0, 1]."""
    return Uniform01()


@pytest.fixture(scope="session")
def power_cross_half():
    """F^{-1}(t) = 1/2 + sgn(h)|h|^{1/2}: cruce no Lipschitz en 1/2."""
    return PowerCrossQuantile(r=0.5)


@pytest.fixture(scope="session")
def power_tangent_two():
    """G^{-1}(t) = t + sgn(h) h^2: contacto de orden 2 en 1/2."""
    return PowerTangentQuantile(r=2.0)


@pytest.fixture(scope="session")
def bernoulli_pair():
    """Par (Bernoulli(0.6), Bernoulli(0.3)) con H = {2/5} y V = {7/10}."""
    return Bernoulli("3/5"), Bernoulli("3/10")


@pytest.fixture(scope="session")
def three_atoms():
    """Ley finita con tres átomos y probabilidades racionales."""
    return FiniteSupport(
        atoms=(Fraction(0), Fraction(1), Fraction(2)),
        probs=(Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)),
    )


@pytest.fixture(scope="session")
def power_contact():
    """Fábrica de pares (Uniforme, G) con Delta(h) = C sgn(h)|h|^r en t0 = 1/2."""

    def _make(r: float, C: float):  # noqa: N803
        segment = QuantileSegment(c=0.5, slope=1.0, scale=C, anchor=0.5, power=r, signed=True)
        return Uniform01(), PiecewiseQuantile(breakpoints=(), segments=(segment,))

    return _make


@pytest.fixture(scope="session")
def random_finite_law():
    """Fábrica de leyes finitas aleatorias sobre {0, ..., pool-1} con pesos positivos."""

    def _make(rng: np.random.Generator, pool: int = 6, max_atoms: int = 5) -> FiniteSupport:
        k = int(rng.integers(1, max_atoms + 1))
        atoms = sorted(rng.choice(pool, size=k, replace=False).tolist())
        weights = rng.integers(1, 7, size=k).tolist()
        total = sum(weights)
        return FiniteSupport(
            atoms=tuple(Fraction(a) for a in atoms),
            probs=tuple(Fraction(w, total) for w in weights),
        )

    return _make
