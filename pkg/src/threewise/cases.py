"""Per-link audits of the inequality chains that close each case of ``h``.

Every chain is split into links; each link is a single inequality checked
separately for every ``t`` in a range.  Links that involve only ``p0`` and
``q0 = 1 - p0`` are decided exactly in ``Q(sqrt(4t+9))``.  Links with ``e``
or ``sqrt(t)`` are decided with rational interval enclosures whose
precision doubles up to a digit cap; running out of precision gives an
``undecided`` verdict.

Each link carries ``claimed_from``, the least ``t`` for which the chain
asserts it.  Steps below that are still evaluated but marked out of scope,
so they show up in the report without affecting the exit code.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .exact import (
    DEFAULT_CAP_DIGITS,
    BoundInterval,
    decide,
    digits_to_bits,
    e_interval,
    p0_of_t,
    sign,
    sqrt_interval,
)
from .report import FAILS, HOLDS, UNDECIDED, AuditReport, AuditStep

HALF = Fraction(1, 2)
MAX_T = 10**4

CASE_ALIASES = {"1": "h1", "2": "h2", "3": "h3", "h1": "h1", "h2": "h2", "h3": "h3", "mid": "mid", "large": "large"}


def h_max(t: int) -> int:
    """Largest ``h`` with ``h <= sqrt(t)/2 - 5/4``, i.e. ``(4h+5)**2 <= 4t``; -1 if none."""
    return (math.isqrt(4 * t) - 5) // 4


@lru_cache(maxsize=None)
def _e(bits: int) -> BoundInterval:
    return e_interval(bits // 3 + 5)


@lru_cache(maxsize=4096)
def _pq(t: int):
    p = p0_of_t(t)
    return p, 1 - p


# ---------------------------------------------------------------------------
# verdict helpers
# ---------------------------------------------------------------------------


def _exact(lhs, rhs, strict: bool = True):
    """Verdict of ``lhs < rhs`` (or ``<=``) in the quadratic field."""
    s = sign(rhs - lhs)
    ok = s > 0 or (s == 0 and not strict)
    return (HOLDS if ok else FAILS), lhs, rhs, None


def _interval(build: Callable[[int], tuple[BoundInterval, BoundInterval]], cap_digits: int):
    """Verdict of ``lhs < rhs`` where ``build(bits)`` encloses both sides.

    Sides are never equal for these irrational quantities, so a certified
    sign of ``rhs - lhs`` settles strict and non-strict forms alike.
    """
    sides = {}

    def diff(bits):
        lhs, rhs = build(bits)
        sides["v"] = (lhs, rhs)
        return rhs - lhs

    s, _ = decide(diff, cap_digits=cap_digits)
    lhs, rhs = sides["v"]
    if s is None:
        return UNDECIDED, lhs, rhs, None
    return (HOLDS if s > 0 else FAILS), lhs, rhs, None


# ---------------------------------------------------------------------------
# chain values
# ---------------------------------------------------------------------------


def h1_value(t: int):
    p, q = _pq(t)
    return p + t * p**3 * q


def h2_value(t: int):
    p, q = _pq(t)
    return p**2 + (t + 1) * p**3 * q + math.comb(t + 1, 2) * p**5 * q**2


def h3_value(t: int):
    p, q = _pq(t)
    return sum(math.comb(t + 2, i) * p ** (3 + i) * q**i for i in range(4))


def f_value(t: int, bits: int = 64) -> BoundInterval:
    """Enclosure of ``sqrt(t) * p0 * q0``."""
    p, q = _pq(t)
    return sqrt_interval(t, bits) * BoundInterval.of(p * q, bits)


# ---------------------------------------------------------------------------
# links
# ---------------------------------------------------------------------------


def _p0_at_most(c: Fraction):
    def run(t, cap):
        return _exact(_pq(t)[0], c, strict=False)

    return run


def _below_half(value: Callable):
    def run(t, cap):
        return _exact(value(t), HALF)

    return run


def _decreasing(value: Callable):
    def run(t, cap):
        a, b = value(t + 1), value(t)
        return _interval(lambda bits: (BoundInterval.of(a, bits), BoundInterval.of(b, bits)), cap)

    return run


def _mid_p0_bound(t, cap):
    # p0 <= 2/(2 sqrt(t) - 1)
    p = _pq(t)[0]
    return _interval(lambda b: (BoundInterval.of(p, b), 2 / (2 * sqrt_interval(t, b) - 1)), cap)


def _mid_ekr_range(t, cap):
    # 2/(2 sqrt(t) - 1) <= 1/(2(h+1)) at h = h_max
    h = h_max(t)
    return _interval(lambda b: (2 / (2 * sqrt_interval(t, b) - 1), BoundInterval.exact(Fraction(1, 2 * (h + 1)), b)), cap)


def _mid_p0_ekr(t, cap):
    return _exact(_pq(t)[0], Fraction(1, 2 * (h_max(t) + 1)), strict=False)


def _mid_ratio_rewrite(t, cap):
    # (h+1)/(t-1) <= (sqrt(t) - 1/2)/(2(t-1)) at h = h_max
    h = h_max(t)
    return _interval(
        lambda b: (BoundInterval.exact(Fraction(h + 1, t - 1), b), (sqrt_interval(t, b) - HALF) / (2 * (t - 1))),
        cap,
    )


def _mid_ratio_sqrt(t, cap):
    # (sqrt(t) - 1/2)/(2(t-1)) <= 1/(2 sqrt(t))
    def build(b):
        r = sqrt_interval(t, b)
        return (r - HALF) / (2 * (t - 1)), 1 / (2 * r)

    return _interval(build, cap)


def _mid_f(t, cap):
    # 1 <= sqrt(t) p0 q0
    return _interval(lambda b: (BoundInterval.exact(1, b), f_value(t, b)), cap)


def _mid_step_stated(t, cap):
    # (h+1)/(t-1) <= p0 q0 / 2 at h = h_max (largest term ratio as written)
    p, q = _pq(t)
    return _exact(Fraction(h_max(t) + 1, t - 1), p * q / 2, strict=False)


def _mid_step_needed(t, cap):
    # max over 0 <= i < h of (i+1)/(t+h-i-1) is h/t, at h = h_max
    p, q = _pq(t)
    return _exact(Fraction(h_max(t), t), p * q / 2, strict=False)


def _mid_binomial(t, cap):
    """``C(t+h-1, h) < (e(t+h-1)/h)**h`` for every ``4 <= h <= h_max``.

    Checked with ``27/10 < e`` in integers: ``C(N,h) (10h)**h < (27N)**h``.
    """
    assert _e(64).lo > Fraction(27, 10)
    worst = None
    for h in range(4, h_max(t) + 1):
        n = t + h - 1
        lhs = math.comb(n, h) * (10 * h) ** h
        rhs = (27 * n) ** h
        r = Fraction(lhs, rhs)
        if worst is None or r > worst[0]:
            worst = (r, h)
        if lhs >= rhs:
            return FAILS, r, Fraction(1), {"h": h}
    return HOLDS, worst[0], Fraction(1), {"h": worst[1]}


def _seven_tenths(t, cap):
    # e (1 + t/4) p0^2 q0 <= 7/10
    p, q = _pq(t)
    core = (1 + Fraction(t, 4)) * p**2 * q
    return _interval(lambda b: (_e(b) * BoundInterval.of(core, b), BoundInterval.exact(Fraction(7, 10), b)), cap)


def _mid_tail(t, cap):
    # 2 * 0.7^h < 1/2 for h >= 4; the left side is largest at h = 4
    return _exact(2 * Fraction(7, 10) ** 4, HALF)


def _fixed(x, frac_bits: int) -> tuple[int, int]:
    iv = BoundInterval.of(x, frac_bits + 64)
    scale = 1 << frac_bits
    return math.floor(iv.lo * scale), math.ceil(iv.hi * scale)


def _sum_bounds(t: int, frac_bits: int):
    """Fixed-point bounds of ``S(h) = sum_{i<=h} C(t+h-1,i) p0^(h+i) q0^i``.

    Returns ``(verdict or None, worst upper bound, its h)`` over
    ``4 <= h <= h_max``.  Floors on the low side and ceilings on the high
    side keep every step a rigorous enclosure.
    """
    p, q = _pq(t)
    x_lo, x_hi = _fixed(p, frac_bits)
    y_lo, y_hi = _fixed(p * q, frac_bits)
    half = 1 << (frac_bits - 1)
    xh_lo, xh_hi = x_lo**4 >> (3 * frac_bits), -((-(x_hi**4)) >> (3 * frac_bits))
    worst = (-1, None)
    for h in range(4, h_max(t) + 1):
        n = t + h - 1
        term_lo, term_hi = xh_lo, xh_hi
        s_lo, s_hi = term_lo, term_hi
        for i in range(h):
            den = (i + 1) << frac_bits
            term_lo = term_lo * (n - i) * y_lo // den
            term_hi = -((-term_hi * (n - i) * y_hi) // den)
            s_lo += term_lo
            s_hi += term_hi
        if s_lo >= half:
            return FAILS, Fraction(s_lo, 1 << frac_bits), h
        if s_hi >= half:
            return None, Fraction(s_hi, 1 << frac_bits), h
        if s_hi > worst[0]:
            worst = (s_hi, h)
        xh_lo = xh_lo * x_lo >> frac_bits
        xh_hi = -((-xh_hi * x_hi) >> frac_bits)
    return HOLDS, Fraction(worst[0], 1 << frac_bits), worst[1]


def _mid_end_to_end(t, cap):
    bits, top = 128, digits_to_bits(cap)
    while True:
        verdict, value, h = _sum_bounds(t, bits)
        if verdict is not None:
            return verdict, value, HALF, {"h": h}
        if bits >= top:
            return UNDECIDED, value, HALF, {"h": h}
        bits = min(2 * bits, top)


def _large_parts(t: int, bits: int):
    p, q = _pq(t)
    a = BoundInterval.of(p / q, bits)
    tail = BoundInterval.of(q, bits).reciprocal() ** t
    return a, tail


def _root_chain(x: Fraction, k: int, bits: int, upper: bool) -> Fraction:
    """Bound on ``x**(1/2**k)`` by ``k`` nested square roots."""
    for _ in range(k):
        iv = sqrt_interval(x, bits)
        x = iv.hi if upper else iv.lo
    return x


def _real_power(a: BoundInterval, f: BoundInterval, bits: int) -> BoundInterval:
    """Enclosure of ``a**f`` for ``0 < a < 1`` and ``0 <= f <= 1``.

    ``f`` is widened to dyadic endpoints ``m / 2**k``; ``a**(1/2**k)`` is
    bracketed by nested square roots and raised to ``m``.  Smaller bases and
    larger exponents give smaller values, which fixes the endpoint pairing.
    """
    k = max(8, bits // 2)
    scale = 1 << k
    m_lo = math.floor(f.lo * scale)
    m_hi = math.ceil(f.hi * scale)
    lo = BoundInterval.exact(_root_chain(a.lo, k, bits + k, False), bits) ** m_hi
    hi = BoundInterval.exact(_root_chain(a.hi, k, bits + k, True), bits) ** m_lo
    return BoundInterval(lo.lo, hi.hi, bits)


def _large_real(t, cap):
    """``(p0/q0)**x (1/q0)**t < 1/2`` with ``x = sqrt(t)/2 - 5/4``.

    ``x = k + f`` with ``k = floor(x)``; the fractional power ``a**f`` is
    enclosed through dyadic roots.
    """
    k = h_max(t)

    def build(b):
        a, tail = _large_parts(t, b)
        f = sqrt_interval(t, b) / 2 - Fraction(5, 4) - k
        f = BoundInterval(max(f.lo, Fraction(0)), min(f.hi, Fraction(1)), b)
        return (a**k) * tail * _real_power(a, f, b), BoundInterval.exact(HALF, b)

    return _interval(build, cap)


def _large_integer(t, cap):
    # members have at least ceil(x) holes, so the exponent can be rounded up
    k = h_max(t) + 1

    def build(b):
        a, tail = _large_parts(t, b)
        return a**k * tail, BoundInterval.exact(HALF, b)

    verdict, lhs, rhs, _ = _interval(build, cap)
    return verdict, lhs, rhs, {"exponent": k}


def _large_ratio_applies(t, cap):
    return _exact(_pq(t)[0], HALF, strict=False)


@dataclass(frozen=True)
class Link:
    claim_id: str
    description: str
    claimed_from: int
    run: Callable
    # least t at which the link is meaningful at all
    defined_from: int = 1


_H1_LINKS = (
    Link("h1.p0_le_1/5", "p0 <= 1/5", 28, _p0_at_most(Fraction(1, 5))),
    Link("h1.p0_le_1/2", "p0 <= 1/2 (ratio bound applies to T_0)", 28, _p0_at_most(HALF)),
    Link("h1.monotone", "p0 < 3/4, so p + t p^3 q increases on (0, p0]", 15, _p0_at_most(Fraction(3, 4))),
    Link("h1.bound", "p0 + t p0^3 q0 < 1/2", 15, _below_half(h1_value)),
)

_H2_LINKS = (
    Link("h2.p0_le_1/7", "p0 <= 1/7", 54, _p0_at_most(Fraction(1, 7))),
    Link("h2.p0_le_1/4", "p0 <= 1/4 (power bound applies to T_1)", 54, _p0_at_most(Fraction(1, 4))),
    Link("h2.monotone", "p0 < 5/7, so each term increases on (0, p0]", 10, _p0_at_most(Fraction(5, 7))),
    Link("h2.bound", "p0^2 + (t+1) p0^3 q0 + C(t+1,2) p0^5 q0^2 < 1/2", 10, _below_half(h2_value)),
    Link("h2.decreasing", "the h=2 bound at t+1 is below its value at t", 10, _decreasing(h2_value)),
)

_H3_LINKS = (
    Link("h3.p0_le_1/8", "p0 <= 1/8", 70, _p0_at_most(Fraction(1, 8))),
    Link("h3.monotone", "p0 < 2/3, so each term increases on (0, p0]", 4, _p0_at_most(Fraction(2, 3))),
    Link("h3.bound", "sum_{i<=3} C(t+2,i) p0^(3+i) q0^i < 1/2", 4, _below_half(h3_value)),
    Link("h3.decreasing", "the h=3 bound at t+1 is below its value at t", 4, _decreasing(h3_value)),
)

_MID_FROM = 111  # least t with h_max(t) >= 4

_MID_LINKS = (
    Link("mid.p0_le", "p0 <= 2/(2 sqrt(t) - 1)", _MID_FROM, _mid_p0_bound, _MID_FROM),
    Link("mid.ekr_range", "2/(2 sqrt(t) - 1) <= 1/(2(h+1)) at h = h_max", _MID_FROM, _mid_ekr_range, _MID_FROM),
    Link("mid.p0_ekr", "p0 <= 1/(2(h+1)) at h = h_max", _MID_FROM, _mid_p0_ekr, _MID_FROM),
    Link("mid.ratio_rewrite", "(h+1)/(t-1) <= (sqrt(t) - 1/2)/(2(t-1)) at h = h_max", _MID_FROM, _mid_ratio_rewrite, _MID_FROM),
    Link("mid.ratio_sqrt", "(sqrt(t) - 1/2)/(2(t-1)) <= 1/(2 sqrt(t))", _MID_FROM, _mid_ratio_sqrt, _MID_FROM),
    Link("mid.f", "1 <= f(t) = sqrt(t) p0 q0", _MID_FROM, _mid_f, _MID_FROM),
    Link("mid.step_stated", "(h+1)/(t-1) <= p0 q0/2 at h = h_max", _MID_FROM, _mid_step_stated, _MID_FROM),
    Link("mid.step_needed", "max_{i<h} (i+1)/(t+h-i-1) = h/t <= p0 q0/2 at h = h_max", _MID_FROM, _mid_step_needed, _MID_FROM),
    Link("mid.binomial", "C(t+h-1,h) < (e(t+h-1)/h)^h for 4 <= h <= h_max", _MID_FROM, _mid_binomial, _MID_FROM),
    Link("mid.seven_tenths", "e (1 + t/4) p0^2 q0 <= 7/10", 20, _seven_tenths),
    Link("mid.tail", "2 (7/10)^h < 1/2 for h >= 4", _MID_FROM, _mid_tail, _MID_FROM),
    Link("mid.end_to_end", "sum_{i<=h} C(t+h-1,i) p0^(h+i) q0^i < 1/2 for 4 <= h <= h_max", _MID_FROM, _mid_end_to_end, _MID_FROM),
)

_LARGE_LINKS = (
    Link("large.p0_le_1/2", "p0 <= 1/2 (ratio bound applies)", 241, _large_ratio_applies),
    Link("large.bound_real", "(p0/q0)^(sqrt(t)/2 - 5/4) (1/q0)^t < 1/2", 241, _large_real, 7),
    Link("large.bound_integer", "(p0/q0)^ceil(sqrt(t)/2 - 5/4) (1/q0)^t < 1/2", 241, _large_integer),
)

CASE_LINKS: dict[str, tuple[Link, ...]] = {
    "h1": _H1_LINKS,
    "h2": _H2_LINKS,
    "h3": _H3_LINKS,
    "mid": _MID_LINKS,
    "large": _LARGE_LINKS,
}


def _audit_chunk(args) -> list[AuditStep]:
    case, ts, cap = args
    steps = []
    for t in ts:
        for link in CASE_LINKS[case]:
            if t < link.defined_from:
                continue
            verdict, lhs, rhs, witness = link.run(t, cap)
            params = {"t": t}
            if case == "mid" and t >= _MID_FROM:
                params["h_max"] = h_max(t)
            steps.append(
                AuditStep(
                    link.claim_id,
                    link.description,
                    verdict,
                    params=params,
                    lhs=lhs,
                    rhs=rhs,
                    witness=witness,
                    in_scope=t >= link.claimed_from,
                )
            )
    return steps


def _summarise(case: str, steps: list[AuditStep]) -> dict:
    out = {}
    for link in CASE_LINKS[case]:
        mine = [s for s in steps if s.claim_id == link.claim_id]
        ts = [s.t for s in mine]
        holds = [s.t for s in mine if s.verdict == HOLDS]
        # least t from which every later t in range holds
        holds_from = None
        for s in reversed(mine):
            if s.verdict != HOLDS:
                break
            holds_from = s.t
        out[link.claim_id] = {
            "claimed_from": link.claimed_from,
            "evaluated": len(mine),
            "holds": len(holds),
            "fails": sum(s.verdict == FAILS for s in mine),
            "undecided": sum(s.verdict == UNDECIDED for s in mine),
            "first_holds": holds[0] if holds else None,
            "holds_from": holds_from,
            "t_min": ts[0] if ts else None,
            "t_max": ts[-1] if ts else None,
        }
    return out


def audit_case_lemmas(
    t_range: tuple[int, int],
    case: str,
    *,
    workers: int = 1,
    cap_digits: int = DEFAULT_CAP_DIGITS,
    max_t: int = MAX_T,
) -> AuditReport:
    """Audit every link of one case chain for ``t_min <= t <= t_max``.

    ``case`` is one of ``h1``, ``h2``, ``h3`` (or ``1``, ``2``, ``3``),
    ``mid`` or ``large``.  With ``workers > 1`` the range is split across
    processes; steps are merged by ``t`` so the report does not depend on
    the worker count.
    """
    if case not in CASE_ALIASES:
        raise ValueError(f"unknown case {case!r}; choose from large, mid, 1, 2, 3")
    case = CASE_ALIASES[case]
    t_min, t_max = t_range
    if t_min < 1 or t_max < t_min:
        raise ValueError(f"bad t range {t_min}:{t_max}")
    if t_max > max_t:
        raise ValueError(f"t range exceeds the configured limit {max_t}")
    ts = list(range(t_min, t_max + 1))
    if workers <= 1 or len(ts) < 2:
        steps = _audit_chunk((case, ts, cap_digits))
    else:
        # interleaved chunks balance the cost, which grows with t
        chunks = [(case, ts[k::workers], cap_digits) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_audit_chunk, chunks))
        order = {link.claim_id: k for k, link in enumerate(CASE_LINKS[case])}
        steps = sorted((s for part in parts for s in part), key=lambda s: (s.t, order[s.claim_id]))
    rep = AuditReport(title=f"case {case}, t = {t_min}..{t_max}", steps=steps)
    rep.summary = {"case": case, "t_range": [t_min, t_max], "cap_digits": cap_digits, "links": _summarise(case, steps)}
    return rep
