"""Where F_1 overtakes the t-star, and how far F_2 lags behind at that point.

Run: python demos/crossover_and_ratio.py
"""

from __future__ import annotations

from fractions import Fraction

from threewise import exact, measure

print("t     p0 (exact)                  p0 (decimal)")
for t in (1, 4, 10, 14, 28, 241):
    p0 = exact.p0_of_t(t)
    print(f"{t:<5} {exact.exact_str(p0):<27} {exact.to_decimal(p0, 20)}")

# at p0 the two frontier families have the same measure
t = 14
p0 = exact.p0_of_t(t)
star = measure.frontier_closed_form(3, t, 0)
f1 = measure.frontier_closed_form(3, t, 1)
print(f"\nmu(F_0) - mu(F_1) at p0({t}) = {star(p0) - f1(p0)}")

# the best ratio mu(F_2)/mu(F_0) over (0, p0] sinks towards 1/2 from above
print("\nt        ratio at p0 - 1/2")
for t in (4, 10, 100, 1000, 10**5):
    gap = measure.ratio_limit_gap(t)
    print(f"{t:<8} in [{float(gap.lo):.3e}, {float(gap.hi):.3e}]")
print("\nexact value at t=4:", measure.ratio_max_at_p0(4), "=", Fraction(7, 8))
