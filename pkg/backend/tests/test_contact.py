"""Tests del análisis de puntos de contacto."""

import math
from fractions import Fraction

import pytest

from galtonrank.contact import (
    _is_locally_constant,
    analyze_contacts,
    classify_finite_support,
    estimate_intensity,
    find_contacts,
    scan_contact_set,
    smooth_contact_constants,
    smooth_limit_constants,
    swap_contact_class,
)
from galtonrank.core.errors import InvalidInputError, LocallyFlatError, OrderExceedsError
from galtonrank.models.contact import ContactClass, ContactPosition, ContactSource, Side
from galtonrank.models.distribution import (
    Bernoulli,
    Normal,
    PiecewiseQuantile,
    QuantileSegment,
    StudentTShift,
)
from galtonrank.oracle import brute_classify_finite


@pytest.fixture(scope="module")
def one_side_flat():
    """G^{-1}(t) = t a la izquierda de 1/2 y t + (t - 1/2)^2 a la derecha."""
    identity = QuantileSegment(c=0.5, slope=1.0, anchor=0.5)
    power = QuantileSegment(c=0.5, slope=1.0, scale=1.0, anchor=0.5, power=2.0)
    return PiecewiseQuantile(breakpoints=(0.5,), segments=(identity, power))


class TestFiniteClassification:
    """Clases H, V, U, L exactas sobre la rejilla acumulada."""

    def test_reversed_bernoulli(self, bernoulli_pair):
        """Bernoulli(0.6) frente a Bernoulli(0.3)."""
        classes = classify_finite_support(*bernoulli_pair)
        assert classes.H == (Fraction(2, 5),)
        assert classes.V == (Fraction(7, 10),)
        assert classes.U == classes.L == ()

    def test_ordered_bernoulli_is_empty(self, bernoulli_pair):
        """Bernoulli(0.3) frente a Bernoulli(0.6): sin contactos."""
        F, G = bernoulli_pair  # noqa: N806
        assert classify_finite_support(G, F).is_empty()

    def test_equal_bernoulli(self):
        """F = G = Bernoulli(1/2): U = {1/2}."""
        d = Bernoulli("1/2")
        assert classify_finite_support(d, d).as_dict() == {"H": [], "V": [], "U": ["1/2"], "L": []}

    def test_agrees_with_brute_force(self, rng, random_finite_law):
        """Coincide con el clasificador directo en 1000 pares aleatorios."""
        for _ in range(1000):
            F, G = random_finite_law(rng), random_finite_law(rng)  # noqa: N806
            fast = classify_finite_support(F, G)
            brute = brute_classify_finite(F, G)
            assert {name: list(getattr(fast, name)) for name in "HVUL"} == brute

    def test_find_contacts_labels(self, bernoulli_pair):
        """find_contacts etiqueta los contactos virtuales con sus constantes unitarias."""
        points = find_contacts(*bernoulli_pair)
        assert [p.contact_class for p in points] == [
            ContactClass.VIRTUAL_HORIZONTAL_CROSSING,
            ContactClass.VIRTUAL_VERTICAL_CROSSING,
        ]
        assert points[0].exact_t0 == "2/5"
        assert (points[1].C_L, points[1].C_R) == (-1.0, 1.0)


class TestSwapMap:
    """Etiquetas bajo intercambio de roles."""

    @pytest.mark.parametrize(
        "cls,expected",
        [
            (ContactClass.CROSSING, ContactClass.CROSSING),
            (ContactClass.UPPER_TANGENCY, ContactClass.LOWER_TANGENCY),
            (ContactClass.VIRTUAL_HORIZONTAL_CROSSING, ContactClass.VIRTUAL_VERTICAL_CROSSING),
        ],
    )
    def test_involution(self, cls, expected):
        """El mapa es una involución."""
        assert swap_contact_class(cls) == expected
        assert swap_contact_class(expected) == cls


class TestIntensity:
    """Ajuste log-log de Delta(h)."""

    @pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("C", [0.5, -0.5])
    def test_recovers_power(self, power_contact, r, C):  # noqa: N803
        """r dentro de 0.05 y C dentro del 10% en pares sintéticos."""
        F, G = power_contact(r, C)  # noqa: N806
        right = estimate_intensity(F, G, 0.5, Side.RIGHT, eta=0.4)
        left = estimate_intensity(F, G, 0.5, "left", eta=0.4)
        assert right.r == pytest.approx(r, abs=0.05)
        assert right.C == pytest.approx(C, rel=0.1)
        assert left.r == pytest.approx(r, abs=0.05)
        assert left.C == pytest.approx(-C, rel=0.1)
        assert right.snapped_r == r

    def test_tangent_example(self, uniform, power_tangent_two):
        """Delta(h) = sgn(h) h^2: r = 2, C_R = 1."""
        est = estimate_intensity(uniform, power_tangent_two, 0.5, "right")
        assert est.r == pytest.approx(2.0, abs=0.05)
        assert est.C == pytest.approx(1.0, rel=0.05)
        assert est.eta == 0.1

    def test_locally_flat(self, uniform):
        """F = G: Delta es ruido de redondeo en toda la escalera."""
        with pytest.raises(LocallyFlatError):
            estimate_intensity(uniform, uniform, 0.5, "right")

    def test_ladder_must_stay_inside(self, uniform, power_tangent_two):
        """Una escalera que sale de (0, 1) es rechazada."""
        with pytest.raises(InvalidInputError):
            estimate_intensity(uniform, power_tangent_two, 0.05, "left", eta=0.5)


class TestContactScan:
    """Búsqueda de contactos en pares continuos."""

    def test_non_lipschitz_cross(self, power_cross_half, uniform):
        """r = 1/2: un único cruce en 1/2 con órdenes 1 y signos opuestos."""
        points = find_contacts(power_cross_half, uniform)
        assert len(points) == 1
        point = points[0]
        assert point.t0 == pytest.approx(0.5, abs=1e-8)
        assert point.contact_class is ContactClass.CROSSING
        assert point.position is ContactPosition.INNER
        assert (point.r_L, point.r_R) == (1.0, 1.0)
        assert point.C_L > 0 > point.C_R

    def test_order_two_contact(self, uniform, power_tangent_two):
        """r = 2 en 1/2 con C_L = -1 y C_R = 1."""
        points = find_contacts(uniform, power_tangent_two)
        assert len(points) == 1
        point = points[0]
        assert (point.r_L, point.r_R) == (2.0, 2.0)
        assert point.C_L == pytest.approx(-1.0, rel=0.05)
        assert point.C_R == pytest.approx(1.0, rel=0.05)
        assert point.effective_order == 2.0

    def test_equal_laws_are_flat(self, uniform):
        """F = G continua: un único segmento plano de medida 1 y ningún punto."""
        scan = scan_contact_set(uniform, uniform)
        assert scan.points == ()
        assert scan.flat_segments == ((0.0, 1.0),)
        assert scan.fixed_point_measure == pytest.approx(1.0)

    def test_cauchy_extremal(self):
        """Cauchy desplazada: contactos extremos de orden 2 con C = pi."""
        F, G = StudentTShift(nu=1.0, mu=0.0), StudentTShift(nu=1.0, mu=1.0)  # noqa: N806
        points = find_contacts(F, G)
        assert [p.position for p in points] == [ContactPosition.EXTREMAL] * 2
        start, end = points
        assert start.end == 0 and end.end == 1
        assert start.contact_class is ContactClass.TANGENCY
        assert start.r_R == 2.0 and start.r_L is None
        assert start.C_R == pytest.approx(math.pi, rel=0.06)
        assert end.r_L == 2.0
        assert start.effective_order == 1.5

    def test_normal_location_role_swap(self):
        """Normal desplazada: F_G no es Lipschitz en los extremos y se expande G_F."""
        F, G = Normal(0.0, 1.0), Normal(1.0, 1.0)  # noqa: N806
        points = analyze_contacts(F, G, t0=0.0)
        assert len(points) == 1
        assert points[0].source is ContactSource.VIA_GF
        assert points[0].C_R < 0

    def test_analyze_single_point(self, uniform, power_tangent_two):
        """Con t0 se analiza solo ese nivel y se guarda la procedencia."""
        (point,) = analyze_contacts(uniform, power_tangent_two, t0=0.5)
        assert set(point.provenance) == {"left", "right"}
        assert point.provenance["right"]["eta"] == 0.1
        assert point.as_dict()["class"] == "crossing"

    def test_analyze_rejects_t0(self, uniform, power_tangent_two):
        """t0 fuera de [0, 1] es rechazado."""
        with pytest.raises(InvalidInputError):
            analyze_contacts(uniform, power_tangent_two, t0=1.5)

    def test_even_order_touch_is_centred(self, uniform):
        """Tangencia de orden 4: la raíz dentro de la banda de redondeo queda en 1/2."""
        segment = QuantileSegment(c=0.5, slope=1.0, scale=1.0, anchor=0.5, power=4.0, signed=False)
        G = PiecewiseQuantile(breakpoints=(), segments=(segment,))  # noqa: N806
        points = find_contacts(uniform, G)
        assert len(points) == 1
        point = points[0]
        assert point.t0 == pytest.approx(0.5, abs=1e-9)
        assert point.contact_class is ContactClass.TANGENCY
        assert (point.r_L, point.r_R) == (4.0, 4.0)

    def test_flat_side_is_kept_out(self, uniform, one_side_flat):
        """Un lado idénticamente nulo se marca y el otro conserva su expansión."""
        (point,) = analyze_contacts(uniform, one_side_flat, t0=0.5)
        assert point.flat_sides == ("left",)
        assert point.r_L is None and point.C_L is None
        assert point.r_R == 2.0
        assert point.C_R == pytest.approx(1.0, rel=0.05)
        assert point.contact_class is ContactClass.TANGENCY
        assert point.effective_order == 2.0
        assert point.provenance["left"] == {"side": "left", "locally_flat": True}
        assert point.as_dict()["flat_sides"] == ["left"]


class TestLocallyConstant:
    """Meseta de F_G: cruce horizontal virtual solo con salto de F^{-1} o G^{-1} plana."""

    def test_slow_power_growth_is_not_flat(self, power_cross_half, uniform):
        """r = 1/2: F_G - t0 = h^2 es pequeño pero no es ruido."""
        assert not _is_locally_constant(power_cross_half, uniform, 0.5)

    def test_quantile_jump_is_flat(self, bernoulli_pair):
        """Bernoulli: F_G vale 2/5 alrededor de 2/5."""
        assert _is_locally_constant(*bernoulli_pair, 0.4)


class TestSmoothConstants:
    """Orden k y h^{(k)} a partir de las densidades."""

    def test_scale_change(self):
        """N(0,1) frente a N(0,2) en 1/2: k = 1, h' = 2 - 1."""
        info = smooth_contact_constants(Normal(0.0, 1.0), Normal(0.0, 2.0), 0.5)
        assert info.k == 1
        assert info.h_derivative == pytest.approx(1.0)
        assert info.x0 == pytest.approx(0.0)
        assert smooth_limit_constants(info) == (1, pytest.approx(-1.0), pytest.approx(1.0))

    def test_equal_laws_exceed_order(self):
        """Leyes iguales no tienen derivada no nula hasta kmax."""
        with pytest.raises(OrderExceedsError):
            smooth_contact_constants(Normal(), Normal(), 0.5, kmax=3)

    def test_even_order_constants(self):
        """k par: C_L = C_R = h^{(k)}/k!."""
        from galtonrank.models.contact import SmoothContactInfo

        assert smooth_limit_constants(SmoothContactInfo(k=2, h_derivative=4.0, x0=0.0)) == (2, 2.0, 2.0)
        assert smooth_limit_constants(SmoothContactInfo(k=3, h_derivative=6.0, x0=0.0)) == (3, -1.0, 1.0)
