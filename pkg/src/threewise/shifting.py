"""Shifting (compression) of set families and (r,t)-maximal closure."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .families import (
    ExplicitFamily,
    _minimal_array,
    is_r_wise_t_intersecting,
    popcounts,
    tuples_intersect,
)

DEFAULT_POLICIES = ("lex", "reverse-lex") + tuple(f"random:{s}" for s in range(8))


@lru_cache(maxsize=None)
def _indices(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _movers(fam: ExplicitFamily, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Members that ``s_ij`` actually moves, and their images."""
    if i == j:
        raise ValueError("shift needs i != j")
    if not (1 <= i <= fam.n and 1 <= j <= fam.n):
        raise ValueError(f"elements must lie in [1, {fam.n}]")
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    idx = _indices(fam.n)
    cand = np.flatnonzero(fam.table & ((idx & bj) != 0) & ((idx & bi) == 0))
    dst = cand ^ (bi | bj)
    free = ~fam.table[dst]
    return cand[free], dst[free]


def shift_once(fam: ExplicitFamily, i: int, j: int) -> ExplicitFamily:
    """Apply ``sigma_{i,j}``: replace j by i in every member where the image is new."""
    src, dst = _movers(fam, i, j)
    if src.size == 0:
        return fam
    table = fam.table.copy()
    table[src] = False
    table[dst] = True
    return ExplicitFamily(fam.n, table)


def is_shifted(fam: ExplicitFamily) -> bool:
    n = fam.n
    for j in range(2, n + 1):
        for i in range(1, j):
            src, _ = _movers(fam, i, j)
            if src.size:
                return False
    return True


def potential(fam: ExplicitFamily) -> int:
    """``sum over members G of sum of the elements of G``."""
    members = fam.members()
    return sum((b + 1) * int(((members >> b) & 1).sum()) for b in range(fam.n))


@dataclass
class ShiftTrace:
    steps: list[tuple[int, int]] = field(default_factory=list)
    potentials: list[int] = field(default_factory=list)
    initial_potential: int = 0
    final_potential: int = 0

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"step": k, "i": i, "j": j, "potential": pot})
            for k, ((i, j), pot) in enumerate(zip(self.steps, self.potentials), 1)
        ]
        return "".join(line + "\n" for line in lines)


def _pair_order(n: int, policy: str, rng: random.Random | None) -> list[tuple[int, int]]:
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    if policy == "lex":
        return pairs
    if policy == "reverse-lex":
        return pairs[::-1]
    if rng is not None:
        rng.shuffle(pairs)
        return pairs
    raise ValueError(f"unknown shift policy {policy!r}")


def _rng_for(policy: str) -> random.Random | None:
    if policy.startswith("random:"):
        return random.Random(int(policy.split(":", 1)[1]))
    if policy in ("lex", "reverse-lex"):
        return None
    raise ValueError(f"unknown shift policy {policy!r}; use lex, reverse-lex or random:<seed>")


def shift_fixpoint(fam: ExplicitFamily, order: str = "lex") -> tuple[ExplicitFamily, ShiftTrace]:
    """Shift until no ``sigma_{i,j}`` with ``i < j`` changes the family.

    ``order`` selects the scan over pairs: ``"lex"`` (default),
    ``"reverse-lex"`` or ``"random:<seed>"``; the scan restarts after every
    effective shift.  Terminates because each effective shift lowers the
    potential by ``(j - i) * moved``.
    """
    rng = _rng_for(order)
    cur = fam
    pot = potential(fam)
    trace = ShiftTrace(initial_potential=pot)
    while True:
        for i, j in _pair_order(fam.n, order, rng):
            src, dst = _movers(cur, i, j)
            if src.size:
                table = cur.table.copy()
                table[src] = False
                table[dst] = True
                cur = ExplicitFamily(cur.n, table)
                pot -= (j - i) * int(src.size)
                trace.steps.append((i, j))
                trace.potentials.append(pot)
                break
        else:
            break
    trace.final_potential = pot
    return cur, trace


# ---------------------------------------------------------------------------
# maximality
# ---------------------------------------------------------------------------


def _compatible(x: int, gens: np.ndarray, r: int, t: int) -> bool:
    """Whether adding ``x`` keeps a family with minimal members ``gens`` r-wise t-intersecting."""
    if x.bit_count() < t:
        return False
    if gens.size == 0:
        return True
    return tuples_intersect(x, gens, r - 1, t)


def _candidate_order(fam: ExplicitFamily, order: str) -> list[int]:
    nonmembers = np.flatnonzero(~fam.table)
    if order == "default":
        sizes = popcounts(fam.n)[nonmembers]
        # size descending, then mask ascending
        return nonmembers[np.lexsort((nonmembers, -sizes))].tolist()
    rng = _rng_for(order)
    if rng is None:
        raise ValueError(f"unknown closure order {order!r}")
    out = nonmembers.tolist()
    rng.shuffle(out)
    return out


def maximal_closure(fam: ExplicitFamily, r: int, t: int, order: str = "default") -> ExplicitFamily:
    """Greedy (r,t)-maximal superfamily.

    Candidates are scanned once, by default in (size descending, mask
    ascending) order, and added whenever the property survives.  One pass is
    enough: adding sets never makes a rejected candidate addable again.
    """
    if not is_r_wise_t_intersecting(fam, r, t):
        raise ValueError(f"family is not {r}-wise {t}-intersecting")
    gens = _minimal_array(fam)
    table = fam.table.copy()
    for x in _candidate_order(fam, order):
        xu = np.uint64(x)
        if gens.size and np.any((gens & xu) == gens):
            table[x] = True
            continue
        if _compatible(x, gens, r, t):
            table[x] = True
            gens = np.append(gens[(gens & xu) != xu], xu)
    return ExplicitFamily(fam.n, table)


def _maximal_nonmembers(fam: ExplicitFamily) -> np.ndarray:
    out = ~fam.table
    table = ~fam.table
    for b in range(fam.n):
        vo = out.reshape(-1, 2, 1 << b)
        vt = table.reshape(-1, 2, 1 << b)
        vo[:, 0, :] &= ~vt[:, 1, :]
    return np.flatnonzero(out)


def addable(fam: ExplicitFamily, r: int, t: int) -> list[int]:
    """Inclusion-maximal non-members whose addition keeps the property.

    For an upward-closed family a non-member is addable only if some
    maximal non-member above it is, so these suffice to decide maximality.
    """
    gens = _minimal_array(fam)
    return [int(x) for x in _maximal_nonmembers(fam) if _compatible(int(x), gens, r, t)]


def is_maximal(fam: ExplicitFamily, r: int, t: int) -> bool:
    """r-wise t-intersecting and no single non-member can be added."""
    if not is_r_wise_t_intersecting(fam, r, t):
        return False
    if not fam.is_upward_closed():
        return False
    return not addable(fam, r, t)
