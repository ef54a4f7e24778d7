from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import strategies as st

from threewise.families import ExplicitFamily


def brute_intersecting(sets: list[frozenset], r: int, t: int) -> bool:
    """Every r members, repetition allowed, share at least t elements."""
    for combo in itertools.combinations_with_replacement(sets, r):
        if len(frozenset.intersection(*combo)) < t:
            return False
    return True


def brute_measure(sets, n: int, p: Fraction) -> Fraction:
    q = 1 - p
    return sum((p ** len(s) * q ** (n - len(s)) for s in sets), Fraction(0))


def as_sets(fam: ExplicitFamily) -> list[frozenset]:
    return [frozenset(i + 1 for i in range(fam.n) if m >> i & 1) for m in fam.members().tolist()]


@st.composite
def families(draw, min_n: int = 1, max_n: int = 6, max_members: int = 12):
    n = draw(st.integers(min_n, max_n))
    masks = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=max_members))
    return ExplicitFamily.from_masks(n, masks)


def random_family(rng: random.Random, n: int, density: float | None = None) -> ExplicitFamily:
    density = rng.random() if density is None else density
    return ExplicitFamily.from_masks(n, [m for m in range(1 << n) if rng.random() < density])


@pytest.fixture
def rng():
    return random.Random(12345)


# -- brute-force oracle: every upward-closed family on [n] ---------------------


def _upward_closed_tables(n):
    size = 1 << n
    low = [sum(1 << m for m in range(size) if not m >> e & 1) for e in range(n)]
    for table in range(1 << size):
        if all(((table & low[e]) << (1 << e)) & ~table == 0 for e in range(n)):
            yield table


def _sets_of(n, table):
    return [frozenset(k + 1 for k in range(n) if m >> k & 1) for m in range(1 << n) if table >> m & 1]


@lru_cache(maxsize=None)
def brute_maximal(n, r, t):
    """Labelled (r,t)-maximal families on [n], as frozensets of frozensets."""
    everything = _sets_of(n, (1 << (1 << n)) - 1)
    out = set()
    for table in _upward_closed_tables(n):
        sets = _sets_of(n, table)
        if not sets or not brute_intersecting(sets, r, t):
            continue
        members = set(sets)
        if any(s not in members and brute_intersecting(sets + [s], r, t) for s in everything):
            continue
        out.add(frozenset(sets))
    return out


def brute_classes(fams, n):
    keys = set()
    for f in fams:
        keys.add(min(tuple(sorted(tuple(sorted(p[e - 1] for e in s)) for s in f)) for p in itertools.permutations(range(1, n + 1))))
    return len(keys)


# -- acceptance criterion log, printed after the run ------------------------------

ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
