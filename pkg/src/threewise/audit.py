"""Hole decomposition of shifted 3-wise t-intersecting families.

For a shifted family ``H`` that is not inside the t-star, ``h`` is the least
``i`` with ``|H & [t+i]| >= t`` for every member.  Members are grouped by
their hole ``A = [t+h-1] - H``; ``T(A)`` collects their traces on
``{t+h, ..., n}`` and ``T_i`` is the trace family of the rightmost hole of
size ``i``.  The functions here extract these objects and check the
intersection properties and the measure bound they satisfy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exact import compare, sign
from .families import (
    ExplicitFamily,
    _minimal_array,
    elements_of,
    frontier_family,
    full_mask,
    interval_mask,
    is_r_wise_t_intersecting,
)
from .measure import mu
from .report import HOLDS, NOT_APPLICABLE, AuditReport
from .shifting import is_shifted


def two_wise_s(fam: ExplicitFamily) -> int:
    """Largest s such that every two members (repetition allowed) share s elements."""
    gens = _minimal_array(fam)
    if gens.size == 0:
        raise ValueError("two_wise_s of an empty family")
    return int(np.bitwise_count(gens[:, None] & gens[None, :]).min())


class HParam(NamedTuple):
    h: int
    witness: int | None
    normalized: bool


def h_param(fam: ExplicitFamily, t: int) -> HParam:
    """``h`` and a member ``H0`` with ``|H0 & [t+h-1]| < t``.

    When some member has ``H0 & [t+h-1] == [t-1]`` that member is returned
    and ``normalized`` is True.  ``h == 0`` (the family lies in the t-star)
    is reported with no witness.
    """
    gens = _minimal_array(fam)
    if gens.size == 0:
        raise ValueError("h_param of an empty family")
    h = 0
    while True:
        window = np.uint64(full_mask(t + h))
        if int(np.bitwise_count(gens & window).min()) >= t:
            break
        h += 1
        if t + h > fam.n:
            raise ValueError("some member has fewer than t elements")
    if h == 0:
        return HParam(0, None, False)
    members = fam.members()
    w = full_mask(t + h - 1)
    target = full_mask(t - 1)
    norm = members[(members & w) == target]
    if norm.size:
        return HParam(h, int(norm[0]), True)
    short = members[np.bitwise_count(members & w) < t]
    return HParam(h, int(short[0]), False)


@dataclass
class HoleDecomposition:
    """``holes[i]`` is ``T_i`` on ``{t+h, ..., n}``, relabelled to ``[n-t-h+1]``."""

    n: int
    t: int
    s: int
    h: int
    witness_H0: int
    holes: list[ExplicitFamily]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def offset(self) -> int:
        return self.t + self.h - 1

    def hole_sets(self, i: int) -> list[list[int]]:
        """Members of ``T_i`` with their original labels."""
        return [[e + self.offset for e in elements_of(m)] for m in self.holes[i]]


def _require_shifted_3wise(fam: ExplicitFamily, t: int):
    if not is_shifted(fam):
        raise ValueError("family is not shifted")
    if not is_r_wise_t_intersecting(fam, 3, t):
        raise ValueError(f"family is not 3-wise {t}-intersecting")


def hole_families(fam: ExplicitFamily, t: int, h: int | None = None, *, check: bool = True) -> HoleDecomposition:
    """Split a shifted 3-wise t-intersecting family by holes in ``[t+h-1]``."""
    if check:
        _require_shifted_3wise(fam, t)
    hp = h_param(fam, t)
    if h is None:
        h = hp.h
    if h < 1:
        raise ValueError("h = 0: the family lies inside the t-star")
    n = fam.n
    w = t + h - 1
    wmask = full_mask(w)
    members = fam.members()
    holes_of = wmask & ~members
    traces = members >> w
    sizes = np.bitwise_count(holes_of.astype(np.uint64))
    ground = n - w
    holes = []
    for i in range(h + 1):
        rightmost = interval_mask(t + h - i, t + h - 1)
        holes.append(ExplicitFamily.from_masks(ground, traces[holes_of == rightmost].tolist()))

    contained = True
    for a in np.unique(holes_of).tolist():
        i = int(a).bit_count()
        if i > h:
            contained = False
            break
        ti = holes[i].table
        if not ti[traces[holes_of == a]].all():
            contained = False
            break
    checks = {
        "holes_at_most_h": bool(sizes.max() <= h) if sizes.size else True,
        "T(A)_in_T_i": contained,
        "H0_normalized": hp.normalized,
    }
    return HoleDecomposition(
        n=n, t=t, s=two_wise_s(fam), h=h, witness_H0=hp.witness, holes=holes, checks=checks
    )


def measure_bound_rhs(decomp: HoleDecomposition, t: int, p):
    """``sum_i C(t+h-1, i) p^(t+h-1-i) q^i mu_p(T_i)``, the hole bound on ``mu_p(H)``."""
    h = decomp.h
    q = 1 - p
    total = Fraction(0)
    for i in range(h + 1):
        if len(decomp.holes[i]) == 0:
            continue
        total = total + math.comb(t + h - 1, i) * p ** (t + h - 1 - i) * q**i * mu(decomp.holes[i], p)
    return total


def audit_MIFR(fam: ExplicitFamily, t: int, ps=(Fraction(1, 5),)) -> AuditReport:
    """Check the hole-family lemma and the hole measure bound on one family.

    Verdicts: ``1 <= h <= s - t``; each ``T_i`` 2-wise ``(2i+1)``-intersecting;
    ``T_h`` 2-wise ``(2h+2)``-intersecting when the family is not inside
    ``F_h^t``; ``mu_p(H) <= rhs`` for every ``p`` in ``ps``.
    """
    _require_shifted_3wise(fam, t)
    hp = h_param(fam, t)
    if hp.h == 0:
        raise ValueError("h = 0: the family lies inside F_0^t; the lemma does not apply")
    d = hole_families(fam, t, check=False)
    rep = AuditReport(title=f"hole lemma, n={fam.n}, t={t}")
    base = {"t": t, "n": fam.n, "h": d.h, "s": d.s}
    rep.check("mifr.h_ge_1", "h >= 1", d.h >= 1, params=dict(base), lhs=d.h, rhs=1)
    rep.check("mifr.h_le_s_minus_t", "h <= s - t", d.h <= d.s - t, params=dict(base), lhs=d.h, rhs=d.s - t)
    rep.check(
        "mifr.H0_normalized",
        "some member H0 has H0 & [t+h-1] = [t-1]",
        d.checks["H0_normalized"],
        params=dict(base),
        witness=elements_of(d.witness_H0),
    )
    rep.check("mifr.T_contain", "T(A) is inside T_|A| for every hole A", d.checks["T(A)_in_T_i"] and d.checks["holes_at_most_h"], params=dict(base))
    for i, ti in enumerate(d.holes):
        need = 2 * i + 1
        if len(ti) == 0:
            rep.add(f"mifr.T{i}_2wise", f"T_{i} is 2-wise {need}-intersecting (empty)", HOLDS, params={**base, "i": i})
            continue
        got = two_wise_s(ti)
        rep.check(
            f"mifr.T{i}_2wise",
            f"T_{i} is 2-wise {need}-intersecting",
            got >= need,
            params={**base, "i": i},
            lhs=got,
            rhs=need,
        )
    h = d.h
    if t + 3 * h > fam.n:
        rep.add("mifr.Th_strong", "T_h is 2-wise (2h+2)-intersecting: F_h^t undefined for this n", NOT_APPLICABLE, params=dict(base))
    elif fam.issubset(frontier_family(3, t, h, fam.n)):
        rep.add("mifr.Th_strong", "T_h is 2-wise (2h+2)-intersecting: family lies in F_h^t", NOT_APPLICABLE, params=dict(base))
    else:
        th = d.holes[h]
        got = two_wise_s(th) if len(th) else None
        rep.check(
            "mifr.Th_strong",
            "T_h is 2-wise (2h+2)-intersecting",
            got is None or got >= 2 * h + 2,
            params=dict(base),
            lhs=got,
            rhs=2 * h + 2,
        )
    for p in ps:
        lhs = mu(fam, p)
        rhs = measure_bound_rhs(d, t, p)
        rep.check("mifr.eq3", "mu_p(H) <= sum_i C(t+h-1,i) p^(t+h-1-i) q^i mu_p(T_i)", compare(lhs, rhs) <= 0, params={**base, "p": str(p)}, lhs=lhs, rhs=rhs)
    return rep


def ekr_bound(kind: str, s: int, p):
    """Upper bound on the measure of a 2-wise s-intersecting family.

    ``"ratio"``: ``(p/q)**s`` for ``p <= 1/2``; ``"power"``: ``p**s`` for
    ``p <= 1/(s+1)``.
    """
    if sign(p) <= 0:
        raise ValueError("p must be positive")
    if kind == "ratio":
        if compare(p, Fraction(1, 2)) == 1:
            raise ValueError("the ratio bound needs p <= 1/2")
        return (p / (1 - p)) ** s
    if kind == "power":
        if compare(p, Fraction(1, s + 1)) == 1:
            raise ValueError(f"the power bound needs p <= 1/{s + 1}")
        return p**s
    raise ValueError(f"unknown bound kind {kind!r}")
