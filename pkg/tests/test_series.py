from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracle import pmul
from wallcross import _univariate as uni
from wallcross.lattice import ALL_REFINEMENTS, Pairing, refine
from wallcross.series import (
    ConeSeries,
    SeriesError,
    divide_monomial,
    dilog_truncated,
    ray_coefficients,
    ray_power,
    ray_series,
    series_exp,
    series_log,
    times_monomial,
    twisted_mul,
    unit_inverse,
    unit_pow,
)

ORDER = 5
pairings = st.integers(0, 3).map(Pairing)
small = st.integers(-3, 3).map(Fraction)


@st.composite
def series(draw, order=ORDER, constant=None, min_degree=0):
    keys = [(a, d - a) for d in range(min_degree, order + 1) for a in range(d + 1)]
    coeffs = draw(st.dictionaries(st.sampled_from(keys), small, max_size=8))
    if constant is not None:
        coeffs[(0, 0)] = Fraction(constant)
    return ConeSeries(coeffs, order)


units = series(constant=1)
nilpotent = series(min_degree=1)


def to_ordinary(f, p, q):
    return {x: c * refine(x, q, p) for x, c in f.coeffs.items()}


def test_construction_drops_high_degree_and_zeros():
    f = ConeSeries({(1, 0): 2, (3, 3): 5, (0, 1): 0}, 4)
    assert dict(f.coeffs) == {(1, 0): Fraction(2)}
    assert f[(0, 1)] == 0


def test_construction_rejects_outside_cone():
    with pytest.raises(SeriesError):
        ConeSeries({(-1, 2): 1}, 4)
    with pytest.raises(SeriesError):
        ConeSeries({}, 0)
    with pytest.raises(TypeError):
        ConeSeries({(1, 0): 0.5}, 3)


def test_order_mismatch():
    with pytest.raises(SeriesError):
        ConeSeries.one(3) + ConeSeries.one(4)


def test_sign_rule_by_hand():
    p = Pairing(1)
    e10 = ConeSeries.monomial((1, 0), 4)
    e01 = ConeSeries.monomial((0, 1), 4)
    # <(1,0),(0,1)> = 1 is odd
    assert twisted_mul(e10, e01, p) == ConeSeries.monomial((1, 1), 4, -1)
    assert twisted_mul(e10, e01, Pairing(2)) == ConeSeries.monomial((1, 1), 4)
    assert twisted_mul(e10, e10, p) == ConeSeries.monomial((2, 0), 4)


@given(series(), series(), pairings, st.sampled_from(ALL_REFINEMENTS))
def test_twisted_mul_matches_untwisted_oracle(f, g, p, q):
    # e_x = sigma(x) z^x turns the twisted product into the ordinary one
    got = to_ordinary(twisted_mul(f, g, p), p, q)
    assert got == pmul(to_ordinary(f, p, q), to_ordinary(g, p, q), ORDER)


@given(series(), series(), series(), pairings)
def test_ring_axioms(f, g, h, p):
    assert twisted_mul(f, g, p) == twisted_mul(g, f, p)
    assert twisted_mul(twisted_mul(f, g, p), h, p) == twisted_mul(f, twisted_mul(g, h, p), p)
    assert twisted_mul(f, g + h, p) == twisted_mul(f, g, p) + twisted_mul(f, h, p)
    assert twisted_mul(f, ConeSeries.one(ORDER), p) == f


@given(units, pairings)
def test_unit_inverse(f, p):
    assert twisted_mul(f, unit_inverse(f, p), p) == ConeSeries.one(ORDER)


def test_unit_inverse_requires_unit():
    with pytest.raises(SeriesError):
        unit_inverse(ConeSeries({(0, 0): 2}, 3), Pairing(1))


@given(nilpotent, pairings)
def test_exp_log_inverse(h, p):
    assert series_log(series_exp(h, p), p) == h


@given(units, pairings)
def test_log_exp_inverse(f, p):
    assert series_exp(series_log(f, p), p) == f


@given(units, pairings, st.integers(-3, 4))
def test_unit_pow_integer(f, p, m):
    expected = ConeSeries.one(ORDER)
    base = f if m >= 0 else unit_inverse(f, p)
    for _ in range(abs(m)):
        expected = twisted_mul(expected, base, p)
    assert unit_pow(f, m, p) == expected


@given(units, pairings)
def test_unit_pow_rational(f, p):
    r = unit_pow(f, Fraction(1, 3), p)
    assert twisted_mul(twisted_mul(r, r, p), r, p) == f


@given(series(), pairings, st.sampled_from([(1, 0), (0, 1), (1, 1), (2, 1)]))
def test_monomial_multiply_divide(f, p, x):
    big = ConeSeries(f.coeffs, ORDER + 3)
    shifted = times_monomial(big, x, p)
    assert shifted == twisted_mul(big, ConeSeries.monomial(x, ORDER + 3), p)
    assert divide_monomial(shifted, x, p, ORDER) == f


def test_divide_monomial_rejects():
    with pytest.raises(SeriesError):
        divide_monomial(ConeSeries.monomial((0, 1), 3), (1, 0), Pairing(1))


def test_ray_helpers():
    f = ray_series((1, 2), [0, 1, Fraction(1, 2), 7], 6)
    assert dict(f.coeffs) == {(1, 2): 1, (2, 4): Fraction(1, 2)}
    assert ray_coefficients(f, (1, 2)) == [0, 1, Fraction(1, 2)]
    with pytest.raises(SeriesError):
        ray_coefficients(f, (1, 1))


def test_dilog_truncated():
    li = dilog_truncated((1, 1), 7)
    assert ray_coefficients(li, (1, 1)) == [0, 1, Fraction(1, 4), Fraction(1, 9)]
    with pytest.raises(ValueError):
        dilog_truncated((0, 0), 3)


def test_ray_power_matches_unit_pow():
    p = Pairing(1)
    base = [Fraction(1), Fraction(-1)]  # 1 - t
    got = ray_power((1, 1), base, Fraction(-3, 2), 8)
    one_minus = ConeSeries({(0, 0): 1, (1, 1): -1}, 8)
    assert got == unit_pow(one_minus, Fraction(-3, 2), p)


@given(st.lists(small, min_size=1, max_size=7))
def test_univariate_exp_log(tail):
    n = len(tail)
    h = [Fraction(0)] + tail
    assert uni.log(uni.exp(h, n), n) == h
    u = uni.exp(h, n)
    assert uni.mul(uni.power(u, Fraction(1, 2), n), uni.power(u, Fraction(1, 2), n), n) == u
