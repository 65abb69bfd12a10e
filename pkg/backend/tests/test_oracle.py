"""Tests del oráculo de fuerza bruta."""

import math
from fractions import Fraction

import pytest

from galtonrank.core.errors import InvalidInputError
from galtonrank.galton import population_index
from galtonrank.oracle import (
    brute_classify_finite,
    brute_pair_summary,
    enumerate_galton_distribution,
    equality_measure_finite,
    exact_index_finite,
    grid_index,
)


class TestChungFellerEnumeration:
    """La distribución exacta del conteo es uniforme."""

    @pytest.mark.parametrize("n", range(1, 7))
    def test_uniform_pmf(self, n):
        """pmf uniforme en {0, ..., n} con igualdad racional."""
        assert enumerate_galton_distribution(n) == [Fraction(1, n + 1)] * (n + 1)

    def test_cap(self):
        """n por encima del límite de enumeración es rechazado."""
        with pytest.raises(InvalidInputError):
            enumerate_galton_distribution(9)


class TestFiniteIndex:
    """Índice exacto de leyes finitas."""

    def test_bernoulli(self, bernoulli_pair):
        """Resumen exacto del par Bernoulli."""
        assert brute_pair_summary(*bernoulli_pair) == {
            "gamma": "3/10",
            "gamma_reverse": "0/1",
            "equality_measure": "7/10",
        }

    def test_complementarity_and_grid(self, rng, random_finite_law):
        """Barrido, rejilla racional y ruta rápida coinciden; la suma con empates es 1."""
        for _ in range(300):
            F, G = random_finite_law(rng), random_finite_law(rng)  # noqa: N806
            forward = exact_index_finite(F, G)
            backward = exact_index_finite(G, F)
            assert forward + backward + equality_measure_finite(F, G) == 1
            cells = math.lcm(*(p.denominator for p in (*F.levels, *G.levels)))
            assert grid_index(F, G, cells) == forward
            assert population_index(F, G) == forward


class TestBruteClassification:
    """Clasificación directa sin las reglas de la rejilla."""

    def test_reversed_bernoulli(self, bernoulli_pair):
        """H = {2/5}, V = {7/10}."""
        assert brute_classify_finite(*bernoulli_pair) == {
            "H": [Fraction(2, 5)],
            "V": [Fraction(7, 10)],
            "U": [],
            "L": [],
        }

    def test_equal_bernoulli(self):
        """F = G = Bernoulli(1/2): tangencia superior en 1/2."""
        from galtonrank.models.distribution import Bernoulli

        d = Bernoulli("1/2")
        assert brute_classify_finite(d, d)["U"] == [Fraction(1, 2)]
