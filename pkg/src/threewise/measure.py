"""Exact p-biased measures and the F_2 / F_0 ratio at the crossover point."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    BoundInterval,
    MeasurePolynomial,
    compare,
    eval_polynomial,
    p0_of_t,
    quadratic,
    sign,
    to_decimal,
)
from .families import ExplicitFamily, WindowFamily, make_frontier


@dataclass(frozen=True)
class MeasureProfile:
    """Size histogram of a family over a ground (or window) of size ``m``."""

    m: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.m + 1:
            raise ValueError("counts must have length m + 1")
        if sum(self.counts) > 1 << self.m:
            raise ValueError("more members than subsets")

    @classmethod
    def of(cls, fam) -> "MeasureProfile":
        if isinstance(fam, WindowFamily):
            return cls(fam.m, tuple(fam.size_profile()))
        if isinstance(fam, ExplicitFamily):
            return cls(fam.n, tuple(fam.size_profile()))
        raise TypeError(f"not a family: {type(fam).__name__}")

    def polynomial(self) -> MeasurePolynomial:
        return MeasurePolynomial.from_terms(
            (k, self.m - k, c) for k, c in enumerate(self.counts) if c
        )

    def evaluate(self, p):
        return eval_polynomial(self.polynomial(), p)


def mu(fam, p):
    """``sum over members G of p**|G| * q**(|X| - |G|)``, exactly.

    Window families are measured on their window, which gives the same value
    on every ground set containing it.
    """
    return MeasureProfile.of(fam).evaluate(p)


def frontier_closed_form(r: int, t: int, i: int) -> MeasurePolynomial:
    """``sum_{j<=i} C(t+ri, j) p**(t+ri-j) q**j``: the measure of ``F_i^t(r)``."""
    w = t + r * i
    make_frontier(r, t, i)  # validates parameters and the window cap
    return MeasurePolynomial.from_terms((w - j, j, math.comb(w, j)) for j in range(i + 1))


def frontier_profile(r: int, t: int, i: int) -> MeasureProfile:
    """Size histogram of ``F_i^t(r)`` on its window, from binomial counts.

    Needs no membership table, so unlike :func:`frontier_closed_form` it has
    no window cap.
    """
    if r < 2 or t < 1 or i < 0:
        raise ValueError("need r >= 2, t >= 1, i >= 0")
    w = t + r * i
    need = t + (r - 1) * i
    return MeasureProfile(w, tuple(math.comb(w, k) if k >= need else 0 for k in range(w + 1)))


def ratio_polynomial(t: int) -> MeasurePolynomial:
    """``mu_p(F_2^t) / mu_p(F_0^t)`` for 3-wise families, as a polynomial."""
    return MeasurePolynomial.from_terms(
        [(4, 2, math.comb(t + 6, 2)), (5, 1, t + 6), (6, 0, 1)]
    )


def ratio_F2_F0(t: int, p):
    if sign(p) <= 0 or compare(p, p0_of_t(t)) not in (-1, 0):
        raise ValueError(f"p must satisfy 0 < p <= p0({t})")
    return eval_polynomial(ratio_polynomial(t), p)


# ---------------------------------------------------------------------------
# maximiser certificate
# ---------------------------------------------------------------------------


def _enclose_on(coeffs: dict[int, Fraction], a: Fraction, b: Fraction) -> BoundInterval:
    # 0 <= a <= p <= b, so p**k lies in [a**k, b**k]
    lo = hi = Fraction(0)
    for k, c in coeffs.items():
        lo_k, hi_k = a**k, b**k
        if c > 0:
            lo += c * lo_k
            hi += c * hi_k
        else:
            lo += c * hi_k
            hi += c * lo_k
    return BoundInterval(lo, hi, None)


def certify_positive(coeffs: dict[int, Fraction], upper: Fraction, max_depth: int = 40) -> bool:
    """True if the polynomial ``sum c_k p**k`` is > 0 on ``[0, upper]``."""
    stack = [(Fraction(0), Fraction(upper), 0)]
    while stack:
        a, b, depth = stack.pop()
        if _enclose_on(coeffs, a, b).lo > 0:
            continue
        if depth >= max_depth:
            return False
        mid = (a + b) / 2
        stack.append((a, mid, depth + 1))
        stack.append((mid, b, depth + 1))
    return True


def certify_increasing(poly: MeasurePolynomial, upper) -> bool:
    """Certify that ``poly`` is strictly increasing on ``(0, upper]``.

    First tries the monomial test (each positive term ``p**i q**j`` increases
    while ``p < i/(i+j)``); if that fails, the derivative (with its common
    power of ``p`` divided out) is bounded below on a bisection grid.
    """
    if all(c > 0 and i > 0 for i, _, c in poly.terms):
        turning = min(Fraction(i, i + j) for i, j, _ in poly.terms)
        if compare(upper, turning) == -1:
            return True
    deriv = poly.derivative().expand()
    if not deriv:
        return False
    low = min(deriv)
    shifted = {k - low: c for k, c in deriv.items()}
    if isinstance(upper, (int, Fraction)):
        ub = Fraction(upper)
    else:
        ub = BoundInterval.of(upper, 64).hi
    return certify_positive(shifted, ub)


def ratio_max_at_p0(t: int):
    """``max_{0<p<=p0} mu_p(F_2^t)/mu_p(F_0^t)``, attained at ``p0``.

    The maximiser is certified, not assumed; a failed certificate raises.
    """
    p0 = p0_of_t(t)
    poly = ratio_polynomial(t)
    if not certify_increasing(poly, p0):
        raise ArithmeticError(f"could not certify the ratio is increasing up to p0({t})")
    return eval_polynomial(poly, p0)


def ratio_closed_fraction(t: int):
    """The closed form ``16(2t^3 - 3t^2 s + ... + 238)/(s - 1)^6`` with ``s = sqrt(4t+9)``."""
    d = 4 * t + 9
    s = quadratic(0, 1, d)
    num = (
        2 * t**3
        - 3 * t**2 * s
        + 31 * t**2
        - 31 * t * s
        + 153 * t
        - 78 * s
        + 238
    )
    return 16 * num / (s - 1) ** 6


def ratio_limit_gap(t: int, bits: int = 128) -> BoundInterval:
    """Enclosure of ``ratio_max_at_p0(t) - 1/2``."""
    return BoundInterval.of(ratio_max_at_p0(t), bits) - Fraction(1, 2)


def ratio_curve_rows(t_min: int, t_max: int, digits: int = 50) -> list[dict]:
    rows = []
    for t in range(t_min, t_max + 1):
        p0 = p0_of_t(t)
        r = ratio_max_at_p0(t)
        rows.append(
            {
                "t": t,
                "p0": to_decimal(p0, digits),
                "ratio": to_decimal(r, digits),
                "ratio_minus_half": to_decimal(r - Fraction(1, 2), digits),
            }
        )
    return rows

