"""Audit reports and their JSON / CSV / table serialisations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from .exact import exact_str, to_decimal

HOLDS = "holds"
FAILS = "fails"
UNDECIDED = "undecided"
NOT_APPLICABLE = "n/a"

DISPLAY_NOTE = "decimals are display only; verdicts are exact"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_UNDECIDED = 3


@dataclass
class AuditStep:
    claim_id: str
    description: str
    verdict: str
    params: dict[str, Any] = field(default_factory=dict)
    lhs: Any = None
    rhs: Any = None
    witness: Any = None
    # False for steps outside the range a claim asserts (informational only)
    in_scope: bool = True

    @property
    def t(self):
        return self.params.get("t")


@dataclass
class AuditReport:
    title: str = ""
    steps: list[AuditStep] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    def add(self, claim_id: str, description: str, verdict: str, **kw) -> AuditStep:
        step = AuditStep(claim_id, description, verdict, **kw)
        self.steps.append(step)
        return step

    def check(self, claim_id: str, description: str, ok: bool, **kw) -> AuditStep:
        return self.add(claim_id, description, HOLDS if ok else FAILS, **kw)

    def extend(self, other: "AuditReport") -> None:
        self.steps.extend(other.steps)

    def failures(self) -> list[AuditStep]:
        return [s for s in self.steps if s.in_scope and s.verdict == FAILS]

    def undecided(self) -> list[AuditStep]:
        return [s for s in self.steps if s.in_scope and s.verdict == UNDECIDED]

    @property
    def verdict(self) -> str:
        if self.failures():
            return FAILS
        if self.undecided():
            return UNDECIDED
        return HOLDS

    @property
    def exit_code(self) -> int:
        return {HOLDS: EXIT_OK, FAILS: EXIT_FAIL, UNDECIDED: EXIT_UNDECIDED}[self.verdict]

    def by_claim(self, claim_id: str) -> list[AuditStep]:
        return [s for s in self.steps if s.claim_id == claim_id]


def _decimal(x) -> str | None:
    if x is None:
        return None
    if isinstance(x, (bool, int)):
        return str(x)
    return "~" + to_decimal(x, 50)


def _exact(x) -> str | None:
    if x is None:
        return None
    return exact_str(x)


def step_record(step: AuditStep) -> dict[str, Any]:
    return {
        "claim_id": step.claim_id,
        "t": step.t,
        "verdict": step.verdict,
        "lhs_decimal_50": _decimal(step.lhs),
        "rhs_decimal_50": _decimal(step.rhs),
        "lhs_exact": _exact(step.lhs),
        "rhs_exact": _exact(step.rhs),
        "description": step.description,
        "params": {k: v for k, v in step.params.items()},
        "witness": step.witness,
        "in_scope": step.in_scope,
    }


CSV_COLUMNS = ["claim_id", "t", "verdict", "lhs_decimal_50", "rhs_decimal_50", "in_scope"]


def emit_report(report: AuditReport, fmt: str = "json") -> str:
    """Deterministic serialisation of a report."""
    records = [step_record(s) for s in report.steps]
    if fmt == "json":
        return json.dumps(records, indent=None if not records else 1, sort_keys=False, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(["" if rec[c] is None else rec[c] for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "table":
        return _table(records)
    raise ValueError(f"unknown format {fmt!r}")


def _short(x: str | None, width: int = 24) -> str:
    if x is None:
        return "-"
    return x if len(x) <= width else x[: width - 3] + "..."


def _table(records: list[dict]) -> str:
    header = ["claim", "t", "verdict", "lhs", "rhs"]
    rows = [
        [
            rec["claim_id"],
            "" if rec["t"] is None else str(rec["t"]),
            rec["verdict"] + ("" if rec["in_scope"] else "*"),
            _short(rec["lhs_decimal_50"]),
            _short(rec["rhs_decimal_50"]),
        ]
        for rec in records
    ]
    widths = [max(len(r[k]) for r in [header] + rows) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    lines.append(f"({DISPLAY_NOTE}; * = outside the claimed range)")
    return "\n".join(lines) + "\n"
