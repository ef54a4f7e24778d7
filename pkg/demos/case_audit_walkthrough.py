"""Per-link audit of the case chains, including the borderline mid-range link.

Run: python demos/case_audit_walkthrough.py
"""

from __future__ import annotations

from threewise import cases
from threewise.report import emit_report

# h = 1: the bound switches from failing to holding between t = 14 and 15
rep = cases.audit_case_lemmas((13, 16), "1")
print(emit_report(rep, "table"))

# h = 2 and h = 3 anchors are plain rationals
print("h=2 value at t=10:", cases.h2_value(10))
print("h=3 value at t=4: ", cases.h3_value(4))

# mid-range h: every link at t = 111, where h_max first reaches 4
rep = cases.audit_case_lemmas((111, 111), "mid")
print()
print(emit_report(rep, "table"))
f = cases.f_value(111, 128)
print(f"sqrt(t) p0 q0 at t=111 lies in [{float(f.lo):.6f}, {float(f.hi):.6f}], below 1,")
print("yet the step the chain actually needs (h/t <= p0 q0 / 2) holds and so does the final sum.")
