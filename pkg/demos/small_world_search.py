"""Exhaustive search at desk scale: maximal 3-wise families and shifting.

Run: python demos/small_world_search.py
"""

from __future__ import annotations

from fractions import Fraction

from threewise import families, measure, search

n, r, t = 5, 3, 1
classes = search.enumerate_maximal(n, r, t)
print(f"({r},{t})-maximal families on [{n}]: {len(classes)} classes, "
      f"{sum(c.orbit_size for c in classes)} labelled families")
p = Fraction(1, 4)
for k, c in enumerate(classes):
    print(f"  class {k}: orbit {c.orbit_size:>3}, mu_1/4 = {measure.mu(c.canonical, p)}, generators {list(c.generators)}")

rep = search.verify_recognition(n, r, t, 1)
print(f"\nshifting into F_1 forces a copy of F_1: {rep.verdict}")

# the second-layer family beats F_1 only once the ground set is big enough
t, p = 2, Fraction(1, 5)
f1 = measure.frontier_closed_form(3, t, 1)(p)
for n in range(6, 15):
    m = measure.mu(families.second_layer(t, n), p)
    print(f"n={n:<3} second layer {'>' if m > f1 else '<'} F_1 at p=1/5")
