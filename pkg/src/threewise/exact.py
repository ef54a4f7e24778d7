"""Exact scalar tower: rationals, one quadratic field, and rational intervals.

Three kinds of scalar are used throughout the package:

* ``Fraction`` -- exact rationals (always reduced, positive denominator).
* ``QuadraticValue`` -- ``a + b*sqrt(d)`` with rational ``a, b`` and a fixed
  non-square radicand ``d``.  Values whose irrational part vanishes, or whose
  radicand is a perfect square, are returned as plain ``Fraction``.
* ``BoundInterval`` -- a closed interval with rational endpoints.  Arithmetic
  rounds outward to a fixed number of significant bits, so an interval
  verdict is a proof, never an estimate.

Comparisons that cross towers promote rational -> quadratic -> interval and
refine the interval precision until the verdict is certain or a cap is hit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Union

Rational = Fraction

DEFAULT_CAP_DIGITS = 200
_BITS_PER_DIGIT = math.log2(10)


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * _BITS_PER_DIGIT)) + 4


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` into a Fraction; decimals are rejected."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"malformed rational {text!r}; expected 'a/b'")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@lru_cache(maxsize=4096)
def _square_part(d: int) -> tuple[int, int]:
    """``(k, m)`` with ``d = k*k*m`` and ``m`` square-free."""
    k, m, f = 1, d, 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            k *= f
        f += 1 if f == 2 else 2
    return k, m


# ---------------------------------------------------------------------------
# Quadratic field
# ---------------------------------------------------------------------------


def quadratic(a, b, d: int):
    """Build ``a + b*sqrt(d)``, degrading to a Fraction when possible."""
    a = Fraction(a)
    b = Fraction(b)
    if d < 0:
        raise ValueError("radicand must be non-negative")
    if b == 0:
        return a
    if _is_square(d):
        return a + b * math.isqrt(d)
    k, m = _square_part(d)
    return QuadraticValue(a, b * k, m)


class QuadraticValue:
    """An element ``a + b*sqrt(d)`` of Q(sqrt(d)) with ``b != 0``.

    Instances are immutable.  Use :func:`quadratic` to construct values so
    that rational results come back as ``Fraction``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Fraction, b: Fraction, d: int):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticValue is immutable")

    def __reduce__(self):
        return (QuadraticValue, (self.a, self.b, self.d))

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadraticValue):
            if other.d != self.d:
                raise ValueError(
                    f"cannot combine values from Q(sqrt({self.d})) and Q(sqrt({other.d}))"
                )
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return quadratic(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticValue(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return quadratic(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return quadratic(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        x, y = c
        return quadratic(self.a * x + self.b * y * self.d, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self) -> "QuadraticValue":
        return QuadraticValue(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        # n == 0 would need sqrt(d) rational, excluded by construction
        return quadratic(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadraticValue):
            self._coerce(other)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return quadratic(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result: Union[Fraction, QuadraticValue] = Fraction(1)
        base: Union[Fraction, QuadraticValue] = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadraticValue):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        return sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- conversion -------------------------------------------------------
    def to_interval(self, bits: int = 64) -> "BoundInterval":
        root = sqrt_interval(self.d, bits)
        return BoundInterval.exact(self.a, bits) + root * self.b

    def __float__(self):
        return float(self.to_interval(64).midpoint())

    def __repr__(self):
        return f"QuadraticValue({self.a}, {self.b}, {self.d})"

    def __str__(self):
        sgn = "+" if self.b > 0 else "-"
        return f"{self.a} {sgn} {abs(self.b)}*sqrt({self.d})"


Scalar = Union[Fraction, QuadraticValue, "BoundInterval"]


def sign(x) -> int:
    """Exact sign of a rational or quadratic value.

    For ``a + b*sqrt(d)`` the sign is decided from the signs of ``a`` and
    ``b`` and, when they disagree, by comparing ``a**2`` with ``b**2 * d``.
    """
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, QuadraticValue):
        sa = (x.a > 0) - (x.a < 0)
        sb = (x.b > 0) - (x.b < 0)
        if sa == 0:
            return sb
        if sb == 0 or sa == sb:
            return sa
        # opposite signs: the larger of a^2 and b^2 d wins
        diff = x.a * x.a - x.b * x.b * x.d
        return sa if diff > 0 else sb
    if isinstance(x, BoundInterval):
        s = x.sign()
        if s is None:
            raise ValueError("interval straddles zero; sign undecided")
        return s
    raise TypeError(f"unsupported scalar {type(x).__name__}")


def p0_of_t(t: int):
    """The crossover probability ``2/(sqrt(4t+9)-1)`` as an exact value."""
    if t < 1:
        raise ValueError("t must be >= 1")
    d = 4 * t + 9
    if _is_square(d):
        return Fraction(2, math.isqrt(d) - 1)
    # 2/(sqrt(d)-1) = 2(sqrt(d)+1)/(d-1)
    c = Fraction(2, d - 1)
    return quadratic(c, c, d)


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


def _scaled_floor(x: Fraction, e: int) -> int:
    """floor(x * 2**(-e))"""
    n, d = x.numerator, x.denominator
    if e >= 0:
        return n // (d << e)
    return (n << -e) // d


def round_down(x: Fraction, bits: int | None) -> Fraction:
    """Largest dyadic value with ``bits`` significant bits that is <= x."""
    if bits is None or x == 0:
        return x
    n, d = x.numerator, x.denominator
    e = abs(n).bit_length() - d.bit_length() - bits
    m = _scaled_floor(x, e)
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def round_up(x: Fraction, bits: int | None) -> Fraction:
    if bits is None or x == 0:
        return x
    return -round_down(-x, bits)


@dataclass(frozen=True)
class BoundInterval:
    """Closed interval ``[lo, hi]`` with rational endpoints.

    ``bits`` is the number of significant bits each endpoint is rounded
    (outward) to after every operation; ``None`` keeps endpoints exact.
    """

    lo: Fraction
    hi: Fraction
    bits: int | None = 64

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x, bits: int | None = 64) -> "BoundInterval":
        x = Fraction(x)
        return cls(round_down(x, bits), round_up(x, bits), bits)

    @classmethod
    def of(cls, x, bits: int | None = 64) -> "BoundInterval":
        """Enclose any scalar of the tower."""
        if isinstance(x, BoundInterval):
            return x
        if isinstance(x, QuadraticValue):
            return x.to_interval(bits or 64)
        return cls.exact(x, bits)

    def _make(self, lo: Fraction, hi: Fraction, bits) -> "BoundInterval":
        return BoundInterval(round_down(lo, bits), round_up(hi, bits), bits)

    def _other(self, other):
        if isinstance(other, BoundInterval):
            return other
        if isinstance(other, (int, Fraction, QuadraticValue)):
            return BoundInterval.of(other, self.bits)
        return None

    @staticmethod
    def _bits(a, b):
        if a.bits is None:
            return b.bits
        if b.bits is None:
            return a.bits
        return min(a.bits, b.bits)

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self._make(self.lo + o.lo, self.hi + o.hi, self._bits(self, o))

    __radd__ = __add__

    def __neg__(self):
        return BoundInterval(-self.hi, -self.lo, self.bits)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self._make(self.lo - o.hi, self.hi - o.lo, self._bits(self, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.lo >= 0 and o.lo >= 0:
            lo, hi = self.lo * o.lo, self.hi * o.hi
        else:
            prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
            lo, hi = min(prods), max(prods)
        return self._make(lo, hi, self._bits(self, o))

    __rmul__ = __mul__

    def reciprocal(self) -> "BoundInterval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return self._make(1 / self.hi, 1 / self.lo, self.bits)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return BoundInterval.exact(1, self.bits)
        if self.lo >= 0:
            result = BoundInterval.exact(1, self.bits)
            base = self
            while k:
                if k & 1:
                    result = result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    # -- queries ----------------------------------------------------------
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, BoundInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, QuadraticValue):
            return sign(x - self.lo) >= 0 and sign(self.hi - x) >= 0
        return self.lo <= x <= self.hi

    def sign(self) -> int | None:
        """+1 / -1 / 0 when certain, ``None`` when the interval straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def __float__(self):
        return float(self.midpoint())


def sqrt_interval(x, bits: int = 64) -> BoundInterval:
    """Rational enclosure of ``sqrt(x)`` for a non-negative rational ``x``."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    n, d = x.numerator, x.denominator
    nd = n * d
    # sqrt(n/d) = sqrt(n*d)/d; scale so the integer root has ~bits bits
    k = max(0, bits - nd.bit_length() // 2 + 2)
    s = math.isqrt(nd << (2 * k))
    den = d << k
    if s * s == nd << (2 * k):
        return BoundInterval(Fraction(s, den), Fraction(s, den), bits)
    return BoundInterval(
        round_down(Fraction(s, den), bits), round_up(Fraction(s + 1, den), bits), bits
    )


def e_interval(digits: int) -> BoundInterval:
    """Enclosure of Euler's number with width below ``10**-digits``.

    Uses the partial sum ``S_N`` of ``sum 1/k!`` and the tail bound
    ``sum_{k>N} 1/k! < 1/(N * N!)``.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    target = Fraction(1, 10**digits)
    partial = Fraction(0)
    fact = 1
    k = 0
    while True:
        partial += Fraction(1, fact)
        k += 1
        fact *= k
        # partial = S_{k-1}; tail after S_{k-1} is below 1/((k-1)(k-1)!)
        n = k - 1
        if n >= 1:
            tail = Fraction(1, n * (fact // k))
            if tail < target:
                return BoundInterval(partial, partial + tail, None)


def decide(
    builder: Callable[[int], BoundInterval],
    *,
    start_bits: int = 64,
    cap_digits: int = DEFAULT_CAP_DIGITS,
) -> tuple[int | None, BoundInterval]:
    """Sign of a quantity given as an interval builder, doubling precision.

    ``builder(bits)`` must return an enclosure computed at ``bits``
    significant bits.  Returns ``(sign, last_enclosure)``; ``sign`` is
    ``None`` when the cap is reached without a verdict.
    """
    cap = digits_to_bits(cap_digits)
    bits = min(start_bits, cap)
    while True:
        iv = builder(bits)
        s = iv.sign()
        if s is not None:
            return s, iv
        if bits >= cap:
            return None, iv
        bits = min(2 * bits, cap)


def compare(x, y, cap_digits: int = DEFAULT_CAP_DIGITS) -> int | None:
    """Three-way comparison across the scalar tower.

    Same-field operands compare exactly; otherwise both sides are enclosed
    in intervals refined up to ``cap_digits``.  ``None`` means undecided.
    """
    exact_types = (int, Fraction, QuadraticValue)
    if isinstance(x, exact_types) and isinstance(y, exact_types):
        dx = x.d if isinstance(x, QuadraticValue) else None
        dy = y.d if isinstance(y, QuadraticValue) else None
        if dx is None or dy is None or dx == dy:
            return sign(x - y)
    if isinstance(x, BoundInterval) or isinstance(y, BoundInterval):
        diff = BoundInterval.of(x) - BoundInterval.of(y)
        return diff.sign()
    s, _ = decide(lambda b: BoundInterval.of(x, b) - BoundInterval.of(y, b), cap_digits=cap_digits)
    return s


def to_interval(x, bits: int = 64) -> BoundInterval:
    return BoundInterval.of(x, bits)


def to_decimal(x, digits: int = 50) -> str:
    """Decimal rendering with ``digits`` significant digits (display only)."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        mid = x
    else:
        mid = BoundInterval.of(x, digits_to_bits(digits + 10)).midpoint()
    with localcontext() as ctx:
        ctx.prec = digits
        value = Decimal(mid.numerator) / Decimal(mid.denominator)
    return format(value, "f") if abs(value) >= Decimal("1e-6") or value == 0 else str(value)


def exact_str(x) -> str:
    """Exact textual form: ``a/b`` for rationals, ``a + b*sqrt(d)`` otherwise."""
    if isinstance(x, BoundInterval):
        return f"[{x.lo}, {x.hi}]"
    return str(x)


# ---------------------------------------------------------------------------
# Polynomials in p and q = 1 - p
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasurePolynomial:
    """``sum c * p**i * q**j`` with rational ``c``; equal exponent pairs merged."""

    terms: tuple[tuple[int, int, Fraction], ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int, object]]) -> "MeasurePolynomial":
        acc: dict[tuple[int, int], Fraction] = {}
        for i, j, c in terms:
            if i < 0 or j < 0:
                raise ValueError("exponents must be non-negative")
            acc[(i, j)] = acc.get((i, j), Fraction(0)) + Fraction(c)
        return cls(tuple((i, j, c) for (i, j), c in sorted(acc.items()) if c != 0))

    @classmethod
    def monomial(cls, i: int, j: int = 0, c=1) -> "MeasurePolynomial":
        return cls.from_terms([(i, j, c)])

    def __add__(self, other: "MeasurePolynomial") -> "MeasurePolynomial":
        return MeasurePolynomial.from_terms(self.terms + other.terms)

    def __sub__(self, other: "MeasurePolynomial") -> "MeasurePolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "MeasurePolynomial":
        return MeasurePolynomial.from_terms((i, j, c * v) for i, j, v in self.terms)

    def __mul__(self, other: "MeasurePolynomial") -> "MeasurePolynomial":
        return MeasurePolynomial.from_terms(
            (i1 + i2, j1 + j2, c1 * c2)
            for i1, j1, c1 in self.terms
            for i2, j2, c2 in other.terms
        )

    def expand(self) -> dict[int, Fraction]:
        """Coefficients of the ordinary polynomial in ``p`` (q expanded)."""
        out: dict[int, Fraction] = {}
        for i, j, c in self.terms:
            for k in range(j + 1):
                coef = c * math.comb(j, k) * (-1) ** k
                out[i + k] = out.get(i + k, Fraction(0)) + coef
        return {k: v for k, v in sorted(out.items()) if v != 0}

    def derivative(self) -> "MeasurePolynomial":
        """d/dp, treating ``q = 1 - p``."""
        out = []
        for i, j, c in self.terms:
            if i:
                out.append((i - 1, j, c * i))
            if j:
                out.append((i, j - 1, -c * j))
        return MeasurePolynomial.from_terms(out)

    def __call__(self, p):
        return eval_polynomial(self, p)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for i, j, c in self.terms:
            mono = "*".join(
                s for s in (f"p^{i}" if i else "", f"q^{j}" if j else "") if s
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def _powers(x, k: int) -> list:
    out = [Fraction(1) if not isinstance(x, BoundInterval) else BoundInterval.exact(1, x.bits)]
    for _ in range(k):
        out.append(out[-1] * x)
    return out


def eval_polynomial(f: MeasurePolynomial, p):
    """Exact value of ``f`` at ``p`` in the tower of ``p`` (q := 1 - p)."""
    if isinstance(p, int):
        p = Fraction(p)
    if isinstance(p, (Fraction, QuadraticValue)):
        if not (sign(p) > 0 and sign(1 - p) > 0):
            raise ValueError(f"p must lie in (0, 1), got {exact_str(p)}")
    elif not isinstance(p, BoundInterval):
        raise TypeError(f"unsupported scalar {type(p).__name__}")
    if not f.terms:
        return Fraction(0)
    q = 1 - p
    max_i = max(i for i, _, _ in f.terms)
    max_j = max(j for _, j, _ in f.terms)
    pp = _powers(p, max_i)
    qq = _powers(q, max_j)
    total = Fraction(0)
    for i, j, c in f.terms:
        total = total + pp[i] * qq[j] * c
    return total
