from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import as_sets, brute_measure, families
from threewise.exact import BoundInterval, MeasurePolynomial, compare, eval_polynomial, p0_of_t, sign
from threewise.families import ExplicitFamily, frontier_family, gprime, lift, make_frontier
from threewise.measure import (
    MeasureProfile,
    certify_increasing,
    certify_positive,
    frontier_closed_form,
    frontier_profile,
    mu,
    ratio_closed_fraction,
    ratio_curve_rows,
    ratio_F2_F0,
    ratio_limit_gap,
    ratio_max_at_p0,
    ratio_polynomial,
)

P_GRID = [Fraction(1, 7), Fraction(1, 5), Fraction(1, 3)]


def test_power_set_has_measure_one():
    for n in (1, 4, 7):
        assert mu(ExplicitFamily.power_set(n), Fraction(2, 9)) == 1


def test_star_measure():
    assert mu(make_frontier(3, 2, 0), Fraction(1, 3)) == Fraction(1, 9)
    assert mu(frontier_family(3, 2, 0, 6), Fraction(1, 3)) == Fraction(1, 9)


def test_gprime_measure_at_quarter():
    p = Fraction(1, 4)
    want = Fraction(1, 16) - Fraction(1, 16) * Fraction(27, 64) + Fraction(1, 256) * Fraction(3, 4)
    assert mu(gprime(2, 5), p) == want


@pytest.mark.parametrize("p", [0, 1, Fraction(-1, 2), Fraction(3, 2)])
def test_mu_rejects_p_outside_open_interval(p):
    with pytest.raises(ValueError):
        mu(make_frontier(3, 1, 0), p)


def test_profile_validation():
    with pytest.raises(ValueError):
        MeasureProfile(2, (1, 1))
    with pytest.raises(ValueError):
        MeasureProfile(1, (2, 1))
    with pytest.raises(TypeError):
        MeasureProfile.of([1, 2])


@pytest.mark.parametrize("r,t,i", [(r, t, i) for r in (2, 3) for t in range(1, 6) for i in range(3) if t + r * i <= 12])
def test_closed_form_matches_brute_window_measure(r, t, i):
    w = t + r * i
    need = t + (r - 1) * i
    # brute force: enumerate window subsets directly, no library family code
    sets = [frozenset(c) for k in range(w + 1) for c in itertools.combinations(range(w), k) if k >= need]
    poly = frontier_closed_form(r, t, i)
    for p in P_GRID:
        assert eval_polynomial(poly, p) == brute_measure(sets, w, p)
        assert mu(make_frontier(r, t, i), p) == brute_measure(sets, w, p)


def test_closed_form_textbook_shapes():
    p = Fraction(2, 11)
    q = 1 - p
    for t in (1, 3, 6):
        assert eval_polynomial(frontier_closed_form(3, t, 0), p) == p**t
        assert eval_polynomial(frontier_closed_form(3, t, 1), p) == p ** (t + 3) + (t + 3) * p ** (t + 2) * q
        want = math.comb(t + 6, 2) * p ** (t + 4) * q**2 + (t + 6) * p ** (t + 5) * q + p ** (t + 6)
        assert eval_polynomial(frontier_closed_form(3, t, 2), p) == want


@pytest.mark.parametrize("n_extra", range(5))
def test_window_independence(n_extra):
    w = make_frontier(3, 2, 1)
    p = Fraction(3, 10)
    assert mu(lift(w, w.m + n_extra), p) == mu(w, p)


def _random_pair(rng, n):
    masks = list(range(1 << n))
    rng.shuffle(masks)
    k = rng.randrange(len(masks) + 1)
    j = rng.randrange(k, len(masks) + 1)
    return ExplicitFamily.from_masks(n, masks[:k]), ExplicitFamily.from_masks(n, masks[k:j])


def test_additive_and_monotone():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 10)
        a, b = _random_pair(rng, n)
        p = Fraction(rng.randint(1, 19), 20)
        assert mu(a.union(b), p) == mu(a, p) + mu(b, p)
        assert mu(a, p) <= mu(a.union(b), p)


@settings(max_examples=100, deadline=None)
@given(families(max_n=7, max_members=20), st.fractions(min_value=Fraction(1, 50), max_value=Fraction(49, 50)))
def test_mu_matches_brute_force(fam, p):
    assert mu(fam, p) == brute_measure(as_sets(fam), fam.n, p)


# -- the F_2 / F_0 ratio ------------------------------------------------------


def test_ratio_at_t4_is_seven_eighths():
    assert ratio_max_at_p0(4) == Fraction(7, 8)
    assert ratio_F2_F0(4, Fraction(1, 2)) == Fraction(7, 8)
    # cross-check against the lifted families at n = 10
    p = Fraction(1, 2)
    assert mu(frontier_family(3, 4, 2, 10), p) / mu(frontier_family(3, 4, 0, 10), p) == Fraction(7, 8)


def test_ratio_at_t10_against_mpmath():
    p = Fraction(1, 3)
    q = 1 - p
    want = math.comb(16, 2) * p**4 * q**2 + 16 * p**5 * q + p**6
    assert ratio_F2_F0(10, p) == want
    with mpmath.workdps(50):
        approx = mpmath.binomial(16, 2) * mpmath.mpf(1) / 3**4 * (mpmath.mpf(2) / 3) ** 2 + 16 * mpmath.mpf(2) / 3**6 + mpmath.mpf(1) / 3**6
        assert abs(approx - mpmath.mpf(want.numerator) / want.denominator) < mpmath.mpf(10) ** -45


def test_ratio_rejects_p_beyond_p0():
    with pytest.raises(ValueError):
        ratio_F2_F0(10, Fraction(1, 2))
    with pytest.raises(ValueError):
        ratio_F2_F0(10, Fraction(0))


def test_ratio_small_p_goes_to_zero():
    assert ratio_F2_F0(10, Fraction(1, 10**6)) < Fraction(1, 10**20)


@pytest.mark.parametrize("t", [4, 10, 18, 28, 54, 70, 241])
def test_binomial_form_equals_closed_fraction(t):
    assert ratio_max_at_p0(t) == ratio_closed_fraction(t)


def test_ratio_decreasing_and_above_half():
    prev = None
    for t in range(4, 201):
        r = ratio_max_at_p0(t)
        assert sign(r - Fraction(1, 2)) == 1
        if prev is not None:
            assert compare(r, prev) == -1
        prev = r


def test_ratio_limit_gap_large_t():
    gap = ratio_limit_gap(10**5)
    assert isinstance(gap, BoundInterval)
    assert 0 < gap.lo and gap.hi < Fraction(1, 100)


def test_maximiser_certificate():
    assert certify_increasing(ratio_polynomial(50), p0_of_t(50))
    # p^2 q peaks at 2/3, so it is not increasing up to 9/10
    bump = MeasurePolynomial.from_terms([(2, 1, 1)])
    assert certify_increasing(bump, Fraction(1, 2))
    assert not certify_increasing(bump, Fraction(9, 10))


def test_certify_positive():
    assert certify_positive({0: Fraction(1), 1: Fraction(-1)}, Fraction(1, 2))
    assert not certify_positive({0: Fraction(1), 1: Fraction(-1)}, Fraction(2))


def test_ratio_curve_rows():
    rows = ratio_curve_rows(4, 12, digits=30)
    assert [r["t"] for r in rows] == list(range(4, 13))
    assert rows[0]["ratio"] == "0.875"
    values = [Fraction(r["ratio"]) for r in rows]
    assert values == sorted(values, reverse=True)


@pytest.mark.parametrize("r,t,i", [(3, 1, 0), (3, 2, 1), (2, 3, 2), (3, 4, 2)])
def test_profile_matches_window_table(r, t, i):
    assert frontier_profile(r, t, i) == MeasureProfile.of(make_frontier(r, t, i))


def test_profile_beyond_window_cap():
    p = p0_of_t(200)
    assert frontier_profile(3, 200, 1).evaluate(p) == p**200
