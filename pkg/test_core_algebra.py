#!/usr/bin/env python3
"""
Tests for the ring substrate: rationals, UniPoly, FactorSeries and MvPoly
"""

import itertools
import math
import random
from fractions import Fraction

import pytest

from src.core_algebra import (
    FactorSeries,
    GenusKind,
    MvPoly,
    Rational,
    UniPoly,
    format_rational,
    genus_factor,
    mv_product,
    mv_substitute,
    reparametrize_factor,
    series_exp_scaled,
    series_todd,
    to_rational,
)

F = Fraction


def test_to_rational_accepts_strings_and_ints():
    assert to_rational("3/4") == F(3, 4)
    assert to_rational(" -2 ") == F(-2)
    assert to_rational(5) == F(5)
    assert type(to_rational("1/3")) is Rational
    with pytest.raises(TypeError):
        to_rational(True)
    with pytest.raises(ValueError):
        to_rational("three")


def test_format_rational():
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-1, 2)) == "-1/2"
    assert format_rational(0) == "0"


@pytest.mark.parametrize("tag,kind", [
    ("chi-y", GenusKind.CHI_Y),
    ("CHI_Y", GenusKind.CHI_Y),
    ("a-y", GenusKind.A_Y),
    ("A_Y", GenusKind.A_Y),
    ("ly", GenusKind.L_Y),
    (GenusKind.L_Y, GenusKind.L_Y),
])
def test_genus_kind_parse(tag, kind):
    assert GenusKind.parse(tag) is kind


def test_genus_kind_parse_rejects_unknown():
    with pytest.raises(ValueError):
        GenusKind.parse("todd")


def test_unipoly_is_trimmed_and_truncated():
    p = UniPoly("y", [1, 2, 0, 0], cap=5)
    assert p.coeffs == (F(1), F(2))
    assert p.degree == 1
    assert UniPoly("y", [1, 1, 1], cap=1).coeffs == (F(1), F(1))
    assert not UniPoly("y", [0, 0], cap=3)
    assert UniPoly("y", [], cap=0).degree == -1


def test_unipoly_product_respects_smaller_cap():
    one_plus_y = UniPoly("y", [1, 1], cap=1)
    assert (one_plus_y * one_plus_y).coeffs == (F(1), F(2))
    wide = UniPoly("y", [1, 1], cap=4)
    square = wide * wide
    assert square.coeffs == (F(1), F(2), F(1))
    assert square.evaluate(F(1, 2)) == F(9, 4)


def test_unipoly_rejects_mixed_parameters():
    with pytest.raises(ValueError):
        UniPoly("y", [1], cap=1) + UniPoly("z", [1], cap=1)


def test_unipoly_shift_reexpands_around_minus_one():
    y_squared = UniPoly("y", [0, 0, 1], cap=2)
    shifted = y_squared.shift("z", -1)
    assert shifted.var == "z"
    assert shifted.coeffs == (F(1), F(-2), F(1))


def test_unipoly_scalar_arithmetic():
    p = UniPoly("z", [1, 3], cap=2)
    assert (p * 0).degree == -1
    assert (2 - p).coeffs == (F(1), F(-3))
    assert p == UniPoly("z", [1, 3], cap=7)
    assert UniPoly.constant(4, "z", 2) == 4


def test_series_todd_coefficients():
    assert series_todd(6).univariate() == [
        F(1), F(1, 2), F(1, 12), F(0), F(-1, 720), F(0), F(1, 30240),
    ]


def test_series_exp_scaled():
    assert series_exp_scaled(F(-1, 2), 3).univariate() == [F(1), F(-1, 2), F(1, 8), F(-1, 48)]
    with pytest.raises(ValueError):
        series_exp_scaled(1, -1)


def test_factor_series_product_truncates_both_directions():
    a = FactorSeries(2, 1, [[1, 1], [1]])
    product = a * a
    assert product.coefficient(0, 1) == F(2)
    assert product.coefficient(1, 1) == F(2)
    assert product.coefficient(2, 0) == F(1)
    assert product.coefficient(0, 2) == F(0)


def test_factor_series_divide_by_parameter_needs_zero_column():
    with pytest.raises(ValueError):
        FactorSeries(1, 1, [[1, 1]]).divide_by_parameter()
    assert FactorSeries(1, 1, [[0, 3]]).divide_by_parameter().coefficient(0, 0) == F(3)


def test_chi_y_factor_low_order_terms():
    factor = genus_factor("chi-y", "y", 2, 1)
    assert factor.x_coefficient(0).coeffs == (F(1), F(1))
    assert factor.x_coefficient(1).coeffs == (F(1, 2), F(-1, 2))
    assert factor.x_coefficient(2).coeffs == (F(1, 12), F(1, 12))


@pytest.mark.parametrize("kind,linear", [
    ("a-y", (F(0), F(-1))),
    ("l-y", (F(0), F(-2))),
])
def test_twisted_factor_linear_terms(kind, linear):
    factor = genus_factor(kind, "y", 3, 1)
    assert factor.x_coefficient(1) == UniPoly("y", linear, 1)


def test_a_y_factor_without_parameter_is_a_hat():
    factor = genus_factor("a-y", "y", 4, 0)
    assert factor.univariate() == [F(1), F(0), F(-1, 24), F(0), F(7, 5760)]


@pytest.mark.parametrize("xcap", range(13))
def test_l_y_factor_is_a_y_factor_times_cosh(xcap):
    bridge = (series_exp_scaled(F(1, 2), xcap) + series_exp_scaled(F(-1, 2), xcap)).with_caps(pcap=1)
    assert genus_factor("a-y", "y", xcap, 1) * bridge == genus_factor("l-y", "y", xcap, 1)


@pytest.mark.parametrize("xcap", range(13))
def test_todd_series_inverts_its_denominator(xcap):
    denominator = FactorSeries.from_univariate(
        [F((-1) ** j, math.factorial(j + 1)) for j in range(xcap + 1)])
    assert series_todd(xcap) * denominator == FactorSeries.constant(1, xcap)


# nonzero entries through x^3 z^2; everything else vanishes
Z_FACTOR_COEFFICIENTS = {
    "chi-y": {(0, 0): F(1), (1, 0): F(1), (1, 1): F(-1, 2), (2, 2): F(1, 12)},
    "a-y": {(0, 0): F(1), (1, 0): F(1), (1, 1): F(-1), (2, 1): F(-1, 2), (2, 2): F(11, 24), (3, 2): F(1, 8)},
    "l-y": {(0, 0): F(2), (1, 0): F(2), (1, 1): F(-2), (2, 1): F(-1), (2, 2): F(7, 6), (3, 2): F(1, 2)},
}


@pytest.mark.parametrize("kind", sorted(Z_FACTOR_COEFFICIENTS))
def test_z_factor_coefficients(kind):
    factor = genus_factor(kind, "z", 3, 2)
    expected = Z_FACTOR_COEFFICIENTS[kind]
    for j in range(4):
        for k in range(3):
            assert factor.coefficient(j, k) == expected.get((j, k), F(0)), (j, k)


@pytest.mark.parametrize("kind", list(GenusKind))
@pytest.mark.parametrize("pcap", [0, 2, 4])
def test_reparametrized_y_factor_matches_z_factor(kind, pcap):
    direct = genus_factor(kind, "z", 5, pcap)
    via_y = reparametrize_factor(genus_factor(kind, "y", 5, 1), pcap)
    assert via_y == direct


def test_reparametrize_needs_a_y_series():
    with pytest.raises(ValueError):
        reparametrize_factor(genus_factor("chi-y", "z", 3, 2), 2)


def test_mvpoly_binomial_product():
    x1 = MvPoly.variable(1, 2)
    x2 = MvPoly.variable(2, 2)
    one = MvPoly.constant(1, 2)
    product = (one + x1) * (one + x2)
    assert product.terms == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}


def test_mvpoly_truncates_above_degree_cap():
    x1 = MvPoly.variable(1, 2)
    one = MvPoly.constant(1, 2)
    cube = mv_product([one + x1] * 3)
    assert cube.terms == {(0, 0): 1, (1, 0): 3, (2, 0): 3}


def test_mvpoly_var_caps_model_relations():
    g = MvPoly.variable(1, 1, var_caps=(1,), degree_cap=3)
    assert (g * g).is_zero()
    assert MvPoly(1, {(2,): 5}, var_caps=(1,), degree_cap=3).is_zero()


def test_mvpoly_leading_term_is_graded_lex():
    p = MvPoly(2, {(1, 1): 2, (2, 0): 3, (0, 1): 7})
    assert p.leading_term() == ((2, 0), F(3))
    assert [e for e, _ in p.sorted_terms()] == [(2, 0), (1, 1), (0, 1)]
    with pytest.raises(ValueError):
        MvPoly(2).leading_term()


def test_mvpoly_components_and_swaps():
    p = MvPoly(3, {(2, 1, 0): 1, (0, 0, 1): 4}, degree_cap=3)
    assert p.degrees() == [1, 3]
    assert p.homogeneous_component(3).terms == {(2, 1, 0): 1}
    assert p.swap_variables(0, 2).terms == {(0, 1, 2): 1, (1, 0, 0): 4}
    assert p.evaluate([1, 2, F(1, 2)]) == F(4)


def test_mvpoly_rejects_bad_exponents():
    with pytest.raises(ValueError):
        MvPoly(2, {(1,): 1})
    with pytest.raises(ValueError):
        MvPoly(2, {(-1, 0): 1})
    with pytest.raises(ValueError):
        MvPoly.variable(3, 2)


def test_mvpoly_ring_mismatch():
    rational = MvPoly.constant(1, 1)
    unipoly = MvPoly.constant(UniPoly("y", [1], 1), 1, ring="unipoly")
    with pytest.raises(ValueError):
        rational + unipoly


def test_mv_substitute_and_coefficient_slice():
    factor = genus_factor("chi-y", "y", 2, 1)
    poly = mv_substitute(factor, 2, 2)
    assert poly.ring == "unipoly"
    assert poly.coefficient((0, 1)) == UniPoly("y", [F(1, 2), F(-1, 2)], 1)
    y_part = poly.coefficient_slice(1)
    assert y_part.ring == "rational"
    assert y_part.terms == {(0, 0): F(1), (0, 1): F(-1, 2), (0, 2): F(1, 12)}


def test_mv_substitute_needs_enough_x_order():
    with pytest.raises(ValueError):
        mv_substitute(genus_factor("chi-y", "y", 1, 1), 1, 2)


def random_rational(rng):
    return F(rng.randint(-6, 6), rng.randint(1, 5))


def random_unipoly(rng):
    return UniPoly("y", [random_rational(rng) for _ in range(5)], 4)


def random_factor_series(rng):
    return FactorSeries(3, 2, [[random_rational(rng) for _ in range(3)] for _ in range(4)])


MV_EXPONENTS = [e for e in itertools.product(range(4), repeat=3) if sum(e) <= 3]


def random_mvpoly(rng):
    terms = {e: random_rational(rng) for e in rng.sample(MV_EXPONENTS, 6)}
    return MvPoly(3, terms, degree_cap=3)


@pytest.mark.parametrize("make", [random_unipoly, random_factor_series, random_mvpoly],
                         ids=["unipoly", "factor-series", "mvpoly"])
@pytest.mark.parametrize("seed", range(10))
def test_truncated_ring_laws(make, seed):
    rng = random.Random(seed)
    a, b, c = make(rng), make(rng), make(rng)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a - a) * c == b - b
