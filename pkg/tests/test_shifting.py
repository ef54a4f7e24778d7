from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import as_sets, brute_intersecting, families, random_family
from threewise.families import ExplicitFamily, frontier_family, is_r_wise_t_intersecting, mask_of
from threewise.measure import mu
from threewise.shifting import (
    DEFAULT_POLICIES,
    addable,
    is_maximal,
    is_shifted,
    maximal_closure,
    potential,
    shift_fixpoint,
    shift_once,
)


def brute_shift(sets, i, j):
    sets = set(sets)
    out = set()
    for g in sets:
        if j in g and i not in g:
            moved = (g - {j}) | {i}
            out.add(g if moved in sets else moved)
        else:
            out.add(g)
    return out


def test_single_move():
    fam = ExplicitFamily.from_sets(3, [[2, 3]])
    assert shift_once(fam, 1, 3) == ExplicitFamily.from_sets(3, [[1, 2]])


def test_blocked_move():
    fam = ExplicitFamily.from_sets(2, [[1], [2]])
    assert shift_once(fam, 1, 2) == fam


def test_shift_rejects_equal_indices():
    with pytest.raises(ValueError):
        shift_once(ExplicitFamily.empty(3), 2, 2)
    with pytest.raises(ValueError):
        shift_once(ExplicitFamily.empty(3), 1, 4)


@settings(max_examples=150, deadline=None)
@given(families(min_n=2, max_n=6), st.data())
def test_shift_matches_definition(fam, data):
    i = data.draw(st.integers(1, fam.n))
    j = data.draw(st.integers(1, fam.n).filter(lambda x: x != i))
    got = set(as_sets(shift_once(fam, i, j)))
    assert got == brute_shift(as_sets(fam), i, j)


def test_shift_preserves_measure_on_random_families():
    rng = random.Random(99)
    p = Fraction(1, 3)
    for _ in range(100):
        fam = random_family(rng, 8)
        i, j = rng.sample(range(1, 9), 2)
        out = shift_once(fam, i, j)
        assert len(out) == len(fam)
        assert mu(out, p) == mu(fam, p)


@settings(max_examples=150, deadline=None)
@given(families(min_n=2, max_n=5, max_members=8), st.integers(2, 3), st.integers(1, 2), st.data())
def test_shift_preserves_intersecting(fam, r, t, data):
    fam = fam.upward_closure()
    if not brute_intersecting(as_sets(fam), r, t):
        return
    i = data.draw(st.integers(1, fam.n))
    j = data.draw(st.integers(1, fam.n).filter(lambda x: x != i))
    assert is_r_wise_t_intersecting(shift_once(fam, i, j), r, t)


def test_is_shifted_examples():
    assert is_shifted(ExplicitFamily.empty(4))
    assert not is_shifted(ExplicitFamily.from_sets(2, [[2]]))
    for r, t, i, n in [(3, 1, 1, 6), (3, 2, 1, 7), (2, 1, 2, 7), (3, 1, 2, 8)]:
        assert is_shifted(frontier_family(r, t, i, n))


@settings(max_examples=100, deadline=None)
@given(families(max_n=6))
def test_is_shifted_matches_brute_force(fam):
    sets = as_sets(fam)
    want = all(brute_shift(sets, i, j) == set(sets) for i in range(1, fam.n + 1) for j in range(i + 1, fam.n + 1))
    assert is_shifted(fam) == want


def test_fixpoint_example_and_trace():
    fam = ExplicitFamily.from_sets(3, [[2, 3]])
    out, trace = shift_fixpoint(fam)
    assert out == ExplicitFamily.from_sets(3, [[1, 2]])
    assert len(trace.steps) == 2
    assert trace.initial_potential == 5 and trace.final_potential == 3
    lines = [json.loads(x) for x in trace.to_jsonl().splitlines()]
    assert [x["step"] for x in lines] == [1, 2]
    assert lines[-1]["potential"] == 3


def test_fixpoint_of_shifted_family_is_identity():
    fam = frontier_family(3, 1, 1, 6)
    out, trace = shift_fixpoint(fam)
    assert out == fam and trace.steps == []


@pytest.mark.parametrize("policy", DEFAULT_POLICIES)
def test_fixpoint_policies(policy):
    rng = random.Random(5)
    p = Fraction(2, 7)
    for _ in range(10):
        fam = random_family(rng, 7)
        out, trace = shift_fixpoint(fam, policy)
        assert is_shifted(out)
        assert mu(out, p) == mu(fam, p)
        pots = [trace.initial_potential] + list(trace.potentials)
        assert all(a > b for a, b in zip(pots, pots[1:]))
        assert pots[-1] == potential(out) == trace.final_potential


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        shift_fixpoint(ExplicitFamily.empty(2), "sideways")


# -- maximality -----------------------------------------------------------------


def test_closure_of_t_set_is_star():
    for t, n in [(1, 4), (2, 6), (3, 7)]:
        start = ExplicitFamily.from_sets(n, [list(range(1, t + 1))])
        assert maximal_closure(start, 3, t) == frontier_family(3, t, 0, n)


def test_closure_of_triples_in_four_points():
    fam = ExplicitFamily.upward_closure_of(4, [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]])
    assert maximal_closure(fam, 3, 1) == fam
    assert is_maximal(fam, 3, 1)


def test_is_maximal_examples():
    star = frontier_family(3, 2, 0, 5)
    assert is_maximal(star, 3, 2)
    assert not is_maximal(star.without_masks([mask_of([1, 2])]), 3, 2)
    big = ExplicitFamily.from_masks(4, [m for m in range(16) if bin(m).count("1") >= 3])
    assert is_maximal(big, 2, 2)
    assert not is_maximal(ExplicitFamily.power_set(3), 2, 1)


def test_closure_rejects_non_intersecting_input():
    with pytest.raises(ValueError):
        maximal_closure(ExplicitFamily.from_sets(3, [[1], [2]]), 2, 1)


def _brute_maximal(fam, r, t):
    sets = as_sets(fam)
    if not brute_intersecting(sets, r, t):
        return False
    members = set(sets)
    for m in range(1 << fam.n):
        s = frozenset(k + 1 for k in range(fam.n) if m >> k & 1)
        if s not in members and brute_intersecting(sets + [s], r, t):
            return False
    return True


@settings(max_examples=80, deadline=None)
@given(families(min_n=2, max_n=5, max_members=6), st.integers(2, 3), st.integers(1, 2), st.integers(0, 3))
def test_closure_is_maximal_superfamily(fam, r, t, seed):
    fam = fam.upward_closure()
    if not is_r_wise_t_intersecting(fam, r, t):
        return
    order = "default" if seed == 0 else f"random:{seed}"
    out = maximal_closure(fam, r, t, order=order)
    assert fam.issubset(out)
    assert out.is_upward_closed()
    assert is_maximal(out, r, t)
    assert _brute_maximal(out, r, t)
    assert addable(out, r, t) == []


@settings(max_examples=80, deadline=None)
@given(families(min_n=2, max_n=5, max_members=8), st.integers(2, 3), st.integers(1, 2))
def test_is_maximal_matches_brute_force(fam, r, t):
    assert is_maximal(fam, r, t) == _brute_maximal(fam, r, t)
