"""Tests de los muestreadores de leyes límite."""

from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from galtonrank.core.config import settings
from galtonrank.core.errors import HorizonError, InvalidInputError
from galtonrank.limitlaws import (
    maximal_terms,
    occupation_positive,
    renewal_occupation,
    sample_bridge,
    sample_bridge_values,
    sample_finite_support_limit,
    sample_global_limit,
    sample_limit,
    sample_occupation,
    sample_smooth_global_limit,
    sample_smooth_limit,
    sample_T_extremal,
    sample_T_inner,
    sample_virtual,
)
from galtonrank.models.contact import ContactClass, ContactPoint, ContactPosition, SmoothContactInfo
from galtonrank.schemas.limit import load_limit

SEED = 20240101


def _point(t0, position, cls, **sides):
    return ContactPoint(t0=t0, position=position, contact_class=cls, **sides)


class TestBridges:
    """Puentes brownianos en rejilla y en puntos dados."""

    def test_pinned_at_both_ends(self):
        """B(0) = B(1) = 0."""
        path = sample_bridge(N=64, seed=SEED, paths=5)
        assert path.N == 64
        assert np.all(path.values[:, 0] == 0.0)
        assert np.all(path.values[:, -1] == 0.0)

    def test_grid_must_be_power_of_two(self):
        """N = 1000 es rechazado."""
        with pytest.raises(InvalidInputError):
            sample_bridge(N=1000, seed=SEED)

    def test_occupation_of_single_path(self):
        """La ocupación de un camino está en [0, |A|]."""
        path = sample_bridge(N=256, seed=SEED)
        value = occupation_positive(path, [(0.0, 0.5)])
        assert 0.0 <= value <= 0.5

    def test_joint_covariance(self):
        """Cov(B(s), B(t)) = min(s, t) - s t, con columnas en el orden pedido."""
        values = sample_bridge_values([0.6, 0.3], 20000, SEED)
        cov = np.cov(values, rowvar=False)
        assert cov[0, 0] == pytest.approx(0.24, abs=0.015)
        assert cov[1, 1] == pytest.approx(0.21, abs=0.015)
        assert cov[0, 1] == pytest.approx(0.12, abs=0.015)

    def test_points_outside_unit_interval(self):
        """Puntos fuera de [0, 1] son rechazados."""
        with pytest.raises(InvalidInputError):
            sample_bridge_values([1.2], 4, SEED)


class TestOccupation:
    """Tiempo de ocupación positivo del puente."""

    @pytest.mark.slow
    def test_levy_arcsine_is_uniform(self):
        """Sobre (0, 1) la ocupación es Uniforme(0, 1)."""
        draws = sample_occupation([(0.0, 1.0)], 10000, SEED)
        assert stats.kstest(draws, "uniform").statistic <= 0.03

    def test_mean_on_subinterval(self):
        """E l{t in A: B(t) > 0} = |A| / 2."""
        draws = sample_occupation([(0.0, 0.3)], 2000, SEED)
        assert draws.mean() == pytest.approx(0.15, abs=0.015)
        assert draws.min() >= 0.0 and draws.max() <= 0.3 + 1e-12

    def test_single_draw_is_float(self):
        """size=None devuelve un float."""
        assert isinstance(sample_occupation([(0.2, 0.4)], seed=SEED, N=64), float)

    def test_reproducible(self):
        """Misma semilla, mismas extracciones."""
        a = sample_occupation([(0.0, 1.0)], 50, SEED, N=128)
        b = sample_occupation([(0.0, 1.0)], 50, SEED, N=128)
        assert np.array_equal(a, b)


class TestInnerLimit:
    """Ley límite en un contacto interior regular."""

    def test_order_one_crossing_is_horizontal_virtual(self):
        """r = 1 con C_L = 1, C_R = -1 coincide camino a camino con B1/sqrt(lam)."""
        inner = sample_T_inner(0.4, 1.0, 1.0, 1.0, -1.0, 0.3, SEED, 500)
        virtual = sample_virtual(ContactClass.VIRTUAL_HORIZONTAL_CROSSING, 0.4, 0.3, SEED, 500)
        assert np.allclose(inner, virtual)

    def test_tangency_sign(self):
        """C_L, C_R > 0 con r = 2 da valores no negativos."""
        draws = sample_T_inner(0.5, 2.0, 2.0, 1.0, 1.0, 0.5, SEED, 300)
        assert np.all(draws >= 0.0)
        assert np.any(draws > 0.0)

    def test_only_dominant_side_contributes(self):
        """Con r_L < r_R solo cuenta el lado derecho."""
        both = sample_T_inner(0.5, 1.0, 2.0, -1.0, -1.0, 0.5, SEED, 300)
        assert np.all(both <= 0.0)

    def test_swapped_negates(self):
        """La forma intercambiada es la negada con lam -> 1 - lam."""
        direct = sample_T_inner(0.5, 2.0, 2.0, 1.0, 1.0, 0.5, SEED, 200, swapped=True)
        assert np.all(direct <= 0.0)

    @pytest.mark.parametrize(
        "args",
        [
            (0.0, 1.0, 1.0, 1.0, 1.0, 0.5),
            (0.5, 0.5, 1.0, 1.0, 1.0, 0.5),
            (0.5, 1.0, 1.0, 0.0, 1.0, 0.5),
            (0.5, 1.0, 1.0, 1.0, 1.0, 1.0),
        ],
    )
    def test_invalid_arguments(self, args):
        """t0, r, C y lambda fuera de rango son rechazados."""
        with pytest.raises(InvalidInputError):
            sample_T_inner(*args, seed=SEED, size=2)


class TestExtremalLimit:
    """Ley límite en t0 = 0 o t0 = 1."""

    def test_power_signs(self):
        """r > 1: el signo de C fija el signo de las extracciones."""
        positive = sample_T_extremal(0, 2.0, 1.0, 0.5, SEED, 8)
        negative = sample_T_extremal(1, 2.0, -1.0, 0.5, SEED, 8)
        assert np.all(positive >= 0.0) and np.all(negative <= 0.0)
        assert np.array_equal(positive, -negative)

    def test_law_does_not_depend_on_end(self):
        """El extremo solo se registra."""
        assert np.array_equal(
            sample_T_extremal(0, 2.0, 1.0, 0.5, SEED, 4),
            sample_T_extremal(1, 2.0, 1.0, 0.5, SEED, 4),
        )

    def test_renewal_vanishes_below_minus_one(self):
        """r = 1 y C <= -1: la ley es 0."""
        assert np.array_equal(sample_T_extremal(0, 1.0, -1.5, 0.5, SEED, 10), np.zeros(10))

    def test_renewal_signs(self):
        """r = 1: no negativa con C > 0 y no positiva con -1 < C < 0."""
        assert np.all(sample_T_extremal(0, 1.0, 0.5, 0.5, SEED, 10) >= 0.0)
        assert np.all(sample_T_extremal(0, 1.0, -0.5, 0.5, SEED, 10) <= 0.0)

    def test_renewal_step_cap(self, monkeypatch):
        """Un horizonte que excede el tope de pasos lanza HorizonError."""
        monkeypatch.setattr(settings, "RENEWAL_MAX_STEPS", 10)
        with pytest.raises(HorizonError):
            sample_T_extremal(0, 1.0, 0.5, 0.5, SEED, 2)

    def test_invalid_end(self):
        """end debe ser 0 o 1."""
        with pytest.raises(InvalidInputError):
            sample_T_extremal(2, 2.0, 1.0, 0.5, SEED, 2)


class TestRenewalOccupation:
    """Integral exacta de renovación."""

    def test_equal_sequences(self):
        """Sucesiones iguales con lam = 1/2: la desigualdad estricta nunca se cumple."""
        ones = np.ones(8)
        for C in (0.5, -0.5):  # noqa: N806
            assert renewal_occupation(ones, ones, 0.5, C, 10.0) == (0.0, 0.0)

    def test_always_active(self):
        """S2 = 3 S1 con C = 1: activo en todo (0, 10]."""
        value, last = renewal_occupation(np.ones(6), 3.0 * np.ones(6), 0.5, 1.0, 10.0)
        assert value == pytest.approx(2.5)
        assert last == pytest.approx(10.0)

    def test_sequences_too_short(self):
        """Sucesiones que no cubren el horizonte son rechazadas."""
        with pytest.raises(InvalidInputError):
            renewal_occupation(np.ones(2), np.ones(2), 0.5, 1.0, 10.0)


class TestVirtualLimit:
    """Leyes virtuales H, V, U, L."""

    def test_signs(self):
        """U es no negativa y L no positiva."""
        upper = sample_virtual("upper_tangency", 0.5, 0.5, SEED, 400)
        lower = sample_virtual("lower_tangency", 0.5, 0.5, SEED, 400)
        assert np.all(upper >= 0.0) and np.all(lower <= 0.0)
        assert np.any(upper > 0.0) and np.any(lower < 0.0)

    def test_vertical_variance(self):
        """V = -B2/sqrt(1-lam): varianza t0(1-t0)/(1-lam)."""
        draws = sample_virtual("virtual_vertical_crossing", 0.3, 0.25, SEED, 20000)
        assert draws.var() == pytest.approx(0.21 / 0.75, rel=0.05)

    def test_regular_class_rejected(self):
        """Una clase regular no es virtual."""
        with pytest.raises(InvalidInputError):
            sample_virtual("crossing", 0.5, 0.5, SEED, 3)


class TestFiniteSupportLimit:
    """Suma gaussiana con puentes conjuntos."""

    def test_variance_mixed(self):
        """H en 0.3 y V en 0.6 con lam = 1/2: varianza 0.9."""
        draws = sample_finite_support_limit([Fraction(3, 10)], [Fraction(3, 5)], [], [], 0.5, SEED, 20000)
        assert draws.var() == pytest.approx(0.9, rel=0.05)

    def test_variance_shared_bridge(self):
        """Dos H usan el mismo puente: varianza 1.38."""
        draws = sample_finite_support_limit([Fraction(3, 10), Fraction(3, 5)], [], [], [], 0.5, SEED, 20000)
        assert draws.var() == pytest.approx(1.38, rel=0.05)

    def test_harmonic_scaling(self):
        """La escala armónica multiplica por sqrt(lam (1 - lam))."""
        args = ([Fraction(2, 5)], [Fraction(7, 10)], [], [], 0.5, SEED, 100)
        plain = sample_finite_support_limit(*args)
        harmonic = sample_finite_support_limit(*args, harmonic=True)
        assert np.allclose(harmonic, 0.5 * plain)

    def test_empty_classes(self):
        """Sin contactos la ley es 0."""
        assert np.array_equal(sample_finite_support_limit([], [], [], [], 0.5, SEED, 5), np.zeros(5))


class TestGlobalLimit:
    """Suma sobre los contactos de orden máximo."""

    def test_maximal_terms(self):
        """Solo se conservan los términos de orden efectivo máximo."""
        inner = _point(0.5, ContactPosition.INNER, ContactClass.TANGENCY, r_L=2.0, r_R=2.0, C_L=1.0, C_R=1.0)
        extremal = _point(0.0, ContactPosition.EXTREMAL, ContactClass.TANGENCY, r_R=2.0, C_R=1.0)
        virtual = _point(0.3, ContactPosition.INNER, ContactClass.VIRTUAL_HORIZONTAL_CROSSING)
        assert maximal_terms([inner, extremal, virtual]) == [inner]
        assert maximal_terms([extremal, virtual]) == [extremal]
        assert maximal_terms([]) == []

    def test_virtual_term_matches_finite_support(self):
        """Un único término virtual usa los mismos puentes que la suma finita."""
        virtual = _point(0.3, ContactPosition.INNER, ContactClass.VIRTUAL_HORIZONTAL_CROSSING)
        global_draws = sample_global_limit([virtual], 0.5, SEED, 50)
        finite_draws = sample_finite_support_limit([Fraction(3, 10)], [], [], [], 0.5, SEED, 50)
        assert np.allclose(global_draws, finite_draws)

    def test_empty_contact_set(self):
        """Conjunto vacío: la ley es 0."""
        assert np.array_equal(sample_global_limit([], 0.5, SEED, 3), np.zeros(3))

    def test_one_sided_inner_term(self):
        """Un lado localmente plano no aporta: solo queda la parte positiva del lado derecho."""
        point = _point(
            0.5, ContactPosition.INNER, ContactClass.TANGENCY, r_R=2.0, C_R=1.0, flat_sides=("left",)
        )
        draws = sample_global_limit([point], 0.5, SEED, 4000)
        assert np.all(draws >= 0.0)
        assert 0.4 < np.mean(draws == 0.0) < 0.6


class TestSmoothLimit:
    """Formas cerradas para densidades suaves."""

    def test_even_order_matches_inner(self):
        """k = 2, h'' = 2 coincide con el límite interior (2, 2, 1, 1)."""
        smooth = sample_smooth_limit(SmoothContactInfo(k=2, h_derivative=2.0, x0=0.0), 0.5, SEED, 300)
        inner = sample_T_inner(0.5, 2.0, 2.0, 1.0, 1.0, 0.5, SEED, 300)
        assert np.allclose(smooth, inner)

    def test_odd_order_matches_inner(self):
        """k = 3, h''' = 6 coincide con el límite interior (3, 3, -1, 1)."""
        smooth = sample_smooth_limit(SmoothContactInfo(k=3, h_derivative=6.0, x0=0.0), 0.5, SEED, 300)
        inner = sample_T_inner(0.5, 3.0, 3.0, -1.0, 1.0, 0.5, SEED, 300)
        assert np.allclose(smooth, inner)

    def test_order_one_is_gaussian(self):
        """k = 1: combinación lineal de B1 y B2 con la varianza esperada."""
        h = 1.0
        draws = sample_smooth_limit(SmoothContactInfo(k=1, h_derivative=h, x0=0.0), 0.5, SEED, 20000)
        expected = 0.25 * (1.0 / (0.5 * h * h) + (1.0 + 1.0 / h) ** 2 / 0.5)
        assert draws.var() == pytest.approx(expected, rel=0.05)

    def test_global_keeps_maximal_order(self):
        """La suma global descarta los contactos de orden menor."""
        high = SmoothContactInfo(k=2, h_derivative=2.0, x0=0.0, t0=0.3)
        low = SmoothContactInfo(k=1, h_derivative=1.0, x0=1.0, t0=0.6)
        assert np.allclose(
            sample_smooth_global_limit([high, low], 0.5, SEED, 100),
            sample_smooth_global_limit([high], 0.5, SEED, 100),
        )


class TestDispatch:
    """sample_limit sobre especificaciones JSON."""

    def test_inner_spec(self):
        """La especificación interior despacha a sample_T_inner."""
        spec = load_limit({"kind": "inner", "t0": 0.5, "r_L": 2, "r_R": 2, "C_L": -1, "C_R": 1})
        assert np.allclose(sample_limit(spec, 50, SEED), sample_T_inner(0.5, 2.0, 2.0, -1.0, 1.0, 0.5, SEED, 50))

    def test_finite_support_spec(self):
        """Fracciones como cadenas en la especificación finita."""
        spec = load_limit({"kind": "finite_support", "H": ["2/5"], "V": ["7/10"], "harmonic": True})
        assert spec.H == (Fraction(2, 5),)
        assert isinstance(sample_limit(spec, None, SEED), float)

    def test_invalid_spec(self):
        """Una especificación desconocida es un error de entrada."""
        with pytest.raises(InvalidInputError):
            load_limit({"kind": "stable", "alpha": 1.5})
