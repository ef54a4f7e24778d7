from __future__ import annotations

import math
import pickle
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threewise.exact import (
    BoundInterval,
    MeasurePolynomial,
    QuadraticValue,
    compare,
    decide,
    digits_to_bits,
    e_interval,
    eval_polynomial,
    exact_str,
    p0_of_t,
    parse_rational,
    quadratic,
    sign,
    sqrt_interval,
    to_decimal,
)

mpmath.mp.dps = 80

small_q = st.fractions(min_value=-50, max_value=50, max_denominator=40)
radicands = st.sampled_from([2, 3, 5, 13, 17, 65, 89, 4 * 111 + 9, 4 * 1000 + 9])


def mp_of(x):
    if isinstance(x, QuadraticValue):
        return mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.d)
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def mp_p0(t):
    return 2 / (mpmath.sqrt(4 * t + 9) - 1)


# -- rationals on the command line -------------------------------------------


@pytest.mark.parametrize("text,value", [("1/5", Fraction(1, 5)), ("3", Fraction(3)), (" -2/4 ", Fraction(-1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["0.2", "1/0", "a/b", "", "1/-3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


# -- quadratic field -----------------------------------------------------------


def test_quadratic_degrades_to_rational():
    assert quadratic(Fraction(1, 2), 0, 7) == Fraction(1, 2)
    assert isinstance(quadratic(1, 1, 25), Fraction)
    assert quadratic(1, 1, 25) == 6
    assert quadratic(0, 1, 12) == quadratic(0, 2, 3)


@pytest.mark.parametrize("t,expected", [(4, Fraction(1, 2)), (10, Fraction(1, 3)), (18, Fraction(1, 4)), (28, Fraction(1, 5)), (54, Fraction(1, 7)), (70, Fraction(1, 8))])
def test_p0_rational_anchors(t, expected):
    assert p0_of_t(t) == expected


@pytest.mark.parametrize("t", [1, 2, 3, 14, 15, 111, 241, 10**4])
def test_p0_matches_mpmath(t):
    assert abs(mp_of(p0_of_t(t)) - mp_p0(t)) < mpmath.mpf(10) ** -70


def test_p0_solves_crossover_equation():
    # mu(F_1) = mu(F_0) reduces to (t+3) p^2 q + p^3 = 1
    for t in (1, 5, 9, 14, 100, 241):
        p = p0_of_t(t)
        assert (t + 3) * p**2 * (1 - p) + p**3 == 1
        assert sign(p) == 1 and sign(1 - p) == 1


@settings(max_examples=200, deadline=None)
@given(small_q, small_q, small_q, small_q, radicands)
def test_field_operations_match_mpmath(a, b, c, e, d):
    x, y = quadratic(a, b, d), quadratic(c, e, d)
    for got, want in [
        (x + y, mp_of(x) + mp_of(y)),
        (x - y, mp_of(x) - mp_of(y)),
        (x * y, mp_of(x) * mp_of(y)),
    ]:
        assert abs(mp_of(got) - want) < mpmath.mpf(10) ** -60 * (1 + abs(want))
    if y != 0:
        got = x / y
        want = mp_of(x) / mp_of(y)
        assert abs(mp_of(got) - want) < mpmath.mpf(10) ** -50 * (1 + abs(want))


@settings(max_examples=300, deadline=None)
@given(small_q, small_q, radicands)
def test_sign_is_exact(a, b, d):
    x = quadratic(a, b, d)
    v = mp_of(x)
    expected = 0 if v == 0 else (1 if v > 0 else -1)
    if abs(v) > mpmath.mpf(10) ** -60 or v == 0:
        assert sign(x) == expected


@settings(max_examples=100, deadline=None)
@given(small_q, small_q, radicands)
def test_norm_and_conjugate(a, b, d):
    x = quadratic(a, b, d)
    if isinstance(x, QuadraticValue):
        assert x * x.conjugate() == x.norm()
        assert x * x.inverse() == 1


def test_mixed_radicands_rejected():
    with pytest.raises(ValueError):
        quadratic(0, 1, 2) + quadratic(0, 1, 3)


def test_integer_powers():
    x = quadratic(1, 1, 5)
    assert x**3 == x * x * x
    assert x**0 == 1


# -- intervals ---------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(small_q, small_q, radicands, st.sampled_from([24, 64, 200]))
def test_interval_encloses_quadratic(a, b, d, bits):
    x = quadratic(a, b, d)
    iv = BoundInterval.of(x, bits)
    v = mp_of(x)
    assert mp_of(iv.lo) <= v <= mp_of(iv.hi)


@pytest.mark.parametrize("x", [2, 3, Fraction(1, 7), 10**4, 4 * 241 + 9])
def test_sqrt_interval(x):
    for bits in (32, 128, 600):
        iv = sqrt_interval(x, bits)
        assert iv.lo**2 <= x <= iv.hi**2
        assert iv.width() <= Fraction(1, 2 ** (bits - 8)) * (1 + iv.hi)


def test_e_interval_nested_and_correct():
    prev = None
    for digits in (5, 20, 60, 200):
        iv = e_interval(digits)
        assert mp_of(iv.lo) <= mpmath.e <= mp_of(iv.hi)
        assert iv.width() < Fraction(1, 10**digits)
        if prev is not None:
            assert prev.contains(iv)
        prev = iv


@settings(max_examples=100, deadline=None)
@given(small_q, small_q, small_q, small_q)
def test_interval_arithmetic_encloses(a, b, c, d):
    x = BoundInterval(min(a, b), max(a, b), 40)
    y = BoundInterval(min(c, d), max(c, d), 40)
    for u in (x.lo, x.hi, x.midpoint()):
        for v in (y.lo, y.hi, y.midpoint()):
            assert (x + y).contains(u + v)
            assert (x - y).contains(u - v)
            assert (x * y).contains(u * v)
            if y.lo > 0 or y.hi < 0:
                assert (x / y).contains(u / v)


def test_interval_pow_and_sign():
    iv = BoundInterval(Fraction(-1, 2), Fraction(1, 3), None)
    assert iv.sign() is None
    sq = iv**2
    assert sq.lo <= 0 <= sq.hi
    assert BoundInterval.exact(Fraction(3, 2)).sign() == 1
    assert BoundInterval.exact(0, None).sign() == 0


def test_decide_refines_until_certain():
    # sqrt(2) - 1.41421356237 is tiny but positive
    target = Fraction(141421356237, 10**11)
    s, iv = decide(lambda b: sqrt_interval(2, b) - target)
    assert s == 1
    assert iv.lo > 0


def test_decide_reports_undecided_at_cap():
    s, _ = decide(lambda b: BoundInterval(Fraction(-1, 10**300), Fraction(1, 10**300), b), cap_digits=30)
    assert s is None


def test_compare_across_fields():
    assert compare(p0_of_t(14), Fraction(28, 100)) == 1
    assert compare(quadratic(0, 1, 2), quadratic(0, 1, 3)) == -1
    assert compare(Fraction(1, 3), p0_of_t(10)) == 0


def test_digits_to_bits():
    assert digits_to_bits(200) >= 200 * math.log2(10)


def test_decimal_rendering():
    assert to_decimal(Fraction(1, 8), 50) == "0.125"
    assert to_decimal(p0_of_t(14), 50).startswith("0.28319555463432967")
    assert exact_str(Fraction(1, 5)) == "1/5"
    assert exact_str(p0_of_t(14)) == "1/32 + 1/32*sqrt(65)"


# -- polynomials in p, q ------------------------------------------------------


def test_polynomial_expand_and_eval():
    f = MeasurePolynomial.from_terms([(2, 1, 3), (1, 0, 1)])  # 3 p^2 q + p
    assert f.expand() == {1: 1, 2: 3, 3: -3}
    assert eval_polynomial(f, Fraction(1, 2)) == Fraction(3, 8) + Fraction(1, 2)
    deriv = f.derivative().expand()
    assert deriv == {0: 1, 1: 6, 2: -9}


def test_polynomial_rejects_p_outside_unit_interval():
    f = MeasurePolynomial.monomial(1)
    with pytest.raises(ValueError):
        eval_polynomial(f, Fraction(3, 2))
    with pytest.raises(ValueError):
        eval_polynomial(f, 0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-5, 5)), max_size=5), st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)))
def test_polynomial_product_evaluates_to_product(terms, p):
    f = MeasurePolynomial.from_terms(terms)
    g = MeasurePolynomial.from_terms([(1, 1, 2), (0, 2, 1)])
    assert eval_polynomial(f * g, p) == eval_polynomial(f, p) * eval_polynomial(g, p)


def test_values_survive_pickling():
    for x in (p0_of_t(14), BoundInterval.of(p0_of_t(14), 64)):
        y = pickle.loads(pickle.dumps(x))
        assert (y.lo, y.hi) == (x.lo, x.hi) if isinstance(x, BoundInterval) else y == x
