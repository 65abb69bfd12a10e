"""Tests del arnés de verificación Monte Carlo."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from galtonrank.core.errors import InvalidInputError
from galtonrank.models.distribution import Bernoulli, Uniform01
from galtonrank.schemas.experiment import ExperimentConfig
from galtonrank.verify import (
    config_hash,
    decomposition_residual,
    estimate_rate,
    fit_rate,
    ks_distance,
    limit_reference_sample,
    raw_statistic_samples,
    run_convergence_experiment,
    scaled_statistic_samples,
    wasserstein1,
)


@pytest.fixture
def small_config():
    """Experimento Bernoulli pequeño con referencia límite finita."""
    return ExperimentConfig.model_validate(
        {
            "name": "small",
            "F": {"kind": "bernoulli", "p": "3/5"},
            "G": {"kind": "bernoulli", "p": "3/10"},
            "sizes": [[20, 20], [40, 40]],
            "reps": 100,
            "scalings": ["1/2", "0"],
            "limit": {"kind": "finite_support", "H": ["2/5"], "V": ["7/10"]},
            "limit_reps": 200,
            "distance": "both",
            "rate": False,
            "seed": 7,
        }
    )


def _without_timings(report):
    data = report.model_dump()
    data.pop("wall_clock")
    for size in data["sizes"]:
        size.pop("wall_time")
    return data


class TestConfigHash:
    """Huella canónica de la configuración."""

    def test_key_order_does_not_matter(self):
        """Las claves se ordenan antes de calcular el sha256."""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
        assert len(config_hash({"a": 1})) == 64

    def test_distinct_payloads(self):
        """Configuraciones distintas dan huellas distintas."""
        assert config_hash({"seed": 1}) != config_hash({"seed": 2})


class TestDistances:
    """KS y Wasserstein-1 entre muestras."""

    def test_identical_samples(self):
        """Muestras idénticas están a distancia 0."""
        values = np.linspace(-1.0, 1.0, 51)
        assert ks_distance(values, values) == 0.0
        assert wasserstein1(values, values) == 0.0

    def test_shift(self):
        """W1 de una traslación es la traslación."""
        values = np.linspace(0.0, 1.0, 101)
        assert wasserstein1(values, values + 0.3) == pytest.approx(0.3)
        assert ks_distance(values, values + 2.0) == 1.0

    def test_empty_sample(self):
        """Una muestra vacía es rechazada."""
        with pytest.raises(InvalidInputError):
            ks_distance([], [1.0])


class TestRate:
    """Regresión de log IQR sobre log(n + m)."""

    def test_synthetic_power(self):
        """IQR proporcional a N^{-1/4}: pendiente -1/4 exacta."""
        base = np.linspace(-1.0, 1.0, 201)
        totals = [500, 1000, 2000, 4000, 8000]
        estimate = fit_rate(totals, [base * t**-0.25 for t in totals])
        assert estimate.slope == pytest.approx(-0.25, abs=1e-9)
        assert not estimate.exact_regime
        assert estimate.ci_low <= estimate.slope <= estimate.ci_high

    def test_quantile_range(self):
        """El rango 5-95 % de una uniforme escalada es 0.9 veces su anchura."""
        base = np.linspace(-1.0, 1.0, 2001)
        totals = [500, 1000, 2000, 4000]
        estimate = fit_rate(totals, [base * t**-0.25 for t in totals], quantiles=(0.05, 0.95))
        assert estimate.slope == pytest.approx(-0.25, abs=1e-9)
        assert estimate.quantiles == (0.05, 0.95)
        assert estimate.points[0][1] == pytest.approx(1.8 * 500**-0.25)

    def test_exact_regime(self):
        """Dispersión nula: régimen exacto sin pendiente."""
        estimate = fit_rate([100, 1000], [np.zeros(10), np.zeros(10)])
        assert estimate.exact_regime
        assert estimate.slope is None

    def test_ladder_too_short(self):
        """Menos de cuatro tamaños es un error de entrada."""
        with pytest.raises(InvalidInputError):
            estimate_rate(Uniform01(), Uniform01(), [(100, 100), (1000, 1000)], 100, 1)

    def test_ladder_too_narrow(self):
        """Los tamaños deben cubrir al menos una década."""
        sizes = [(100, 100), (120, 120), (150, 150), (180, 180)]
        with pytest.raises(InvalidInputError):
            estimate_rate(Uniform01(), Uniform01(), sizes, 100, 1)


class TestExperimentConfig:
    """Validación de la configuración de experimentos."""

    def test_minimum_reps(self):
        """reps por debajo del mínimo es rechazado."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"F": {"kind": "uniform01"}, "G": {"kind": "uniform01"}, "reps": 50})

    def test_localized_needs_window(self):
        """El estadístico localizado exige t0 y eta dentro de [0, 1]."""
        base = {"F": {"kind": "uniform01"}, "G": {"kind": "uniform01"}, "statistic": "localized"}
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(base)
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**base, "t0": 0.9, "eta": 0.2})

    def test_rate_quantiles_ordered(self):
        """rate_quantiles exige 0 < lo < hi < 1."""
        base = {"F": {"kind": "uniform01"}, "G": {"kind": "uniform01"}}
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**base, "rate_quantiles": [0.9, 0.1]})
        cfg = ExperimentConfig.model_validate({**base, "rate_quantiles": [0.05, 0.95]})
        assert cfg.rate_quantiles == (0.05, 0.95)

    def test_configs_round_trip(self, config_dir, load_config_file):
        """Cada fichero de configs/ valida y su forma canónica es estable."""
        names = sorted(p.name for p in config_dir.glob("*.json"))
        assert names
        for name in names:
            cfg = ExperimentConfig.model_validate(load_config_file(name))
            again = ExperimentConfig.model_validate(cfg.canonical())
            assert again.canonical() == cfg.canonical()
            assert config_hash(again.canonical()) == config_hash(cfg.canonical())


class TestReplications:
    """Réplicas con semillas derivadas."""

    def test_threads_do_not_change_results(self, small_config):
        """Los mismos valores con uno o dos procesos."""
        single = raw_statistic_samples(small_config, 0, threads=1)
        pooled = raw_statistic_samples(small_config, 0, threads=2)
        assert np.array_equal(single, pooled)

    def test_scaled_samples(self, small_config):
        """El escalado multiplica por (n + m)^s."""
        raw = raw_statistic_samples(small_config, 1)
        scaled = scaled_statistic_samples(small_config, 1)
        assert np.allclose(scaled, np.sqrt(80.0) * raw)

    def test_size_index_out_of_range(self, small_config):
        """Índices de tamaño inexistentes son rechazados."""
        with pytest.raises(InvalidInputError):
            raw_statistic_samples(small_config, 5)

    def test_localized_statistic(self):
        """El estadístico localizado queda centrado en la medida de la ventana."""
        cfg = ExperimentConfig.model_validate(
            {
                "F": {"kind": "uniform01"},
                "G": {"kind": "power_tangent", "r": 2},
                "sizes": [[50, 50]],
                "reps": 100,
                "statistic": "localized",
                "t0": 0.5,
                "eta": 0.25,
                "seed": 3,
            }
        )
        raw = raw_statistic_samples(cfg, 0)
        assert np.all(raw >= -0.25 - 1e-9) and np.all(raw <= 0.25 + 1e-9)

    def test_limit_sample_reproducible(self):
        """La muestra límite se reproduce con la misma semilla."""
        spec = {"kind": "virtual", "class": "virtual_horizontal_crossing", "t0": 0.5}
        a = limit_reference_sample(spec, 50, 11)
        b = limit_reference_sample(spec, 50, 11)
        assert np.array_equal(a, b)
        assert a.shape == (50,)


class TestConvergenceExperiment:
    """Informe completo de un experimento."""

    def test_reproducible(self, small_config):
        """Dos ejecuciones con la misma configuración coinciden salvo los tiempos."""
        first = run_convergence_experiment(small_config)
        second = run_convergence_experiment(small_config)
        assert _without_timings(first) == _without_timings(second)

    def test_report_contents(self, small_config, tmp_path):
        """Resúmenes por tamaño y exponente, distancias, evidencia monótona y CSV."""
        report = run_convergence_experiment(small_config, csv_dir=str(tmp_path))
        assert report.population_value == pytest.approx(0.3)
        assert [(s.n, s.m) for s in report.sizes] == [(20, 20), (40, 40)]
        assert [s.exponent for s in report.sizes[0].scaled] == ["1/2", "0/1"]
        assert report.sizes[0].scaled[0].ks is not None
        assert report.sizes[0].scaled[0].wasserstein1 is not None
        assert report.monotone_evidence is not None
        assert report.limit_seed_path == [7, 2**31]
        assert report.rate is None
        lines = (tmp_path / "size_20_20.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# seed=7" and lines[1] == "value"
        assert len(lines) == 102
        assert (tmp_path / "limit.csv").exists()

    def test_rate_skipped_on_short_ladder(self, small_config):
        """Con rate activo y dos tamaños el ajuste se omite."""
        cfg = small_config.model_copy(update={"rate": True, "limit": None})
        report = run_convergence_experiment(cfg)
        assert report.rate is None
        assert report.monotone_evidence is None


class TestDecomposition:
    """Residuo tras restar la medida empírica sobre los puntos fijos."""

    def test_equal_uniform_laws(self):
        """F = G uniforme: el conjunto de puntos fijos es (0, 1) y el residuo es 0."""
        residuals = decomposition_residual(Uniform01(), Uniform01(), 30, 20, 20, 5)
        assert np.array_equal(residuals, np.zeros(20))

    @pytest.mark.slow
    def test_finite_support_residual_shrinks(self):
        """Leyes finitas iguales: el residuo es gamma_hat y decrece con n."""
        d = Bernoulli("2/5")
        residuals = [np.abs(decomposition_residual(d, d, n, n, 300, 9)) for n in (250, 1000, 4000)]
        maxima = [r.max() for r in residuals]
        assert maxima[0] > maxima[1] > maxima[2]
        assert maxima[2] <= 0.05
        assert residuals[2].mean() <= 0.02


@pytest.mark.slow
class TestAcceptance:
    """Reproducción a escala completa de los experimentos de configs/."""

    def test_uniform_count_is_uniform(self, load_config_file):
        """F = G continua: gamma_hat con n = m = 500 es aproximadamente Uniforme(0, 1)."""
        cfg = ExperimentConfig.model_validate(load_config_file("levy_uniform.json"))
        raw = raw_statistic_samples(cfg, 2)
        assert stats.kstest(raw, "uniform").statistic <= 0.05

    def test_non_lipschitz_cross(self, load_config_file):
        """Cruce con r = 1/2: varianza límite 1/2 y cercanía en KS."""
        cfg = ExperimentConfig.model_validate(load_config_file("cross_r_half.json"))
        scaled = scaled_statistic_samples(cfg, 2)
        assert scaled.var() == pytest.approx(0.5, rel=0.15)
        reference = limit_reference_sample(cfg.limit.to_limit_spec(), 10000, cfg.seed)
        assert ks_distance(scaled, reference) <= 0.06

    def test_order_two_rate(self, load_config_file):
        """Contacto de orden 2: pendiente -1/4 del rango 5-95 %."""
        cfg = ExperimentConfig.model_validate(load_config_file("tangent_r2.json"))
        report = run_convergence_experiment(cfg)
        assert report.rate.quantiles == (0.05, 0.95)
        assert report.rate.slope == pytest.approx(-0.25, abs=0.06)

    def test_order_two_law(self, load_config_file):
        """Contacto de orden 2 con n = m = 2000 frente a la ley límite interior."""
        cfg = ExperimentConfig.model_validate(load_config_file("tangent_r2.json"))
        assert cfg.sizes[3] == (2000, 2000)
        scaled = scaled_statistic_samples(cfg, 3)
        reference = limit_reference_sample(cfg.limit.to_limit_spec(), 100000, cfg.seed)
        assert ks_distance(scaled, reference) <= 0.07

    def test_cauchy_extremal_rate(self, load_config_file):
        """Cauchy desplazada: contactos extremos de orden 2 y pendiente -1/3."""
        cfg = ExperimentConfig.model_validate(load_config_file("student_nu1.json"))
        report = run_convergence_experiment(cfg)
        assert report.population_value == pytest.approx(0.0, abs=1e-9)
        assert report.rate.slope == pytest.approx(-1 / 3, abs=0.08)

    def test_bernoulli_harmonic(self, load_config_file):
        """F = G = Bernoulli(1/2) con escala armónica frente a la suma finita."""
        cfg = ExperimentConfig.model_validate(load_config_file("bernoulli_half.json"))
        scaled = scaled_statistic_samples(cfg, 2)
        reference = limit_reference_sample(cfg.limit.to_limit_spec(), 10000, cfg.seed)
        assert ks_distance(scaled, reference) <= 0.07
