"""Command-line front end.

Exact rationals cross the boundary as strings ``"a/b"``.  Audit commands
exit 0 when every in-range verdict holds, 1 on a failure or counterexample,
3 when a verdict is undecided at the precision cap; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import audit, cases, measure, search, shifting
from .exact import DEFAULT_CAP_DIGITS, exact_str, p0_of_t, parse_rational, to_decimal
from .families import (
    CapExceeded,
    ExplicitFamily,
    NAMED_EXAMPLES,
    elements_of,
    families_from_text,
    frontier_family,
    make_named_example,
    minimal_members,
)
from .report import EXIT_OK, EXIT_USAGE, AuditReport, emit_report

FORMATS = ("json", "csv", "table")


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _t_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _tagged(x) -> str:
    """Exact string for rationals, ``~``-tagged decimal otherwise."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return "~" + to_decimal(x, 50)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _emit_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    cols = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    widths = [max([len(c)] + [len(str(r[c])) for r in rows]) for c in cols]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(str(r[c]).ljust(w) for c, w in zip(cols, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _emit_object(obj: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, separators=(",", ":")) + "\n"
    return _emit_rows([{"key": k, "value": json.dumps(v) if not isinstance(v, str) else v} for k, v in obj.items()], fmt)


def _family_record(fam: ExplicitFamily) -> dict:
    return {"n": fam.n, "size": len(fam), "generators": [elements_of(g) for g in minimal_members(fam)]}


# ---------------------------------------------------------------------------
# family input
# ---------------------------------------------------------------------------


def _add_family_args(p: argparse.ArgumentParser, t_required: bool = False):
    src = p.add_argument_group("family (choose one source)")
    src.add_argument("--family", metavar="PATH", help="family text file ('-' for stdin)")
    src.add_argument("--named", choices=sorted(NAMED_EXAMPLES), help="named example, needs --t and --n")
    src.add_argument("--frontier", metavar="R,T,I", help="frontier family F_I^T(R), needs --n")
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int, required=t_required)


def _load_family(args) -> ExplicitFamily:
    chosen = [x for x in (args.family, args.named, args.frontier) if x is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --family, --named, --frontier")
    if args.family is not None:
        text = sys.stdin.read() if args.family == "-" else open(args.family).read()
        fams = families_from_text(text)
        if len(fams) != 1:
            raise UsageError(f"expected one family in {args.family}, found {len(fams)}")
        return fams[0]
    if args.n is None:
        raise UsageError("--n is required")
    if args.named is not None:
        if args.t is None:
            raise UsageError("--t is required for named examples")
        return make_named_example(args.named, args.t, args.n)
    try:
        r, t, i = (int(x) for x in args.frontier.split(","))
    except ValueError:
        raise UsageError(f"--frontier expects R,T,I, got {args.frontier!r}") from None
    return frontier_family(r, t, i, args.n)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_p0(args) -> tuple[str, int]:
    return _emit_object({"t": args.t, "p0": exact_str(p0_of_t(args.t))}, args.format), EXIT_OK


def cmd_measure(args) -> tuple[str, int]:
    fam = _load_family(args)
    ps = args.p or [Fraction(1, 5)]
    rows = [{"p": str(p), "mu": _tagged(measure.mu(fam, p)), "mu_decimal_50": "~" + to_decimal(measure.mu(fam, p), 50)} for p in ps]
    return _emit_rows(rows, args.format), EXIT_OK


def cmd_ratio_curve(args) -> tuple[str, int]:
    rows = measure.ratio_curve_rows(args.t_min, args.t_max)
    if args.format == "json":
        rows = [{"t": r["t"], **{k: "~" + v for k, v in r.items() if k != "t"}} for r in rows]
    return _emit_rows(rows, args.format), EXIT_OK


def cmd_shift(args) -> tuple[str, int]:
    fam = _load_family(args)
    if args.pair:
        i, j = (int(x) for x in args.pair.split(","))
        out = shifting.shift_once(fam, i, j)
        obj = {"family": _family_record(out), "shifted": shifting.is_shifted(out)}
    else:
        out, trace = shifting.shift_fixpoint(fam, args.policy)
        obj = {
            "family": _family_record(out),
            "initial_potential": trace.initial_potential,
            "final_potential": trace.final_potential,
            "trace": [{"step": k, "i": i, "j": j, "potential": pot} for k, ((i, j), pot) in enumerate(zip(trace.steps, trace.potentials), 1)],
        }
    return json.dumps(obj) + "\n", EXIT_OK


def cmd_closure(args) -> tuple[str, int]:
    fam = _load_family(args)
    out = shifting.maximal_closure(fam, args.r, args.t, order=args.order)
    obj = {"family": _family_record(out), "added": len(out) - len(fam), "maximal": shifting.is_maximal(out, args.r, args.t)}
    return json.dumps(obj) + "\n", EXIT_OK


def cmd_decompose(args) -> tuple[str, int]:
    fam = _load_family(args)
    d = audit.hole_families(fam, args.t)
    obj = {
        "n": d.n,
        "t": d.t,
        "s": d.s,
        "h": d.h,
        "witness_H0": elements_of(d.witness_H0),
        "checks": d.checks,
        "holes": [{"i": i, "size": len(ti), "minimal": [[e + d.offset for e in elements_of(g)] for g in minimal_members(ti)]} for i, ti in enumerate(d.holes)],
    }
    return json.dumps(obj) + "\n", EXIT_OK


def _report(rep: AuditReport, fmt: str) -> tuple[str, int]:
    return emit_report(rep, fmt) + ("\n" if fmt == "json" else ""), rep.exit_code


def cmd_audit_mifr(args) -> tuple[str, int]:
    fam = _load_family(args)
    return _report(audit.audit_MIFR(fam, args.t, ps=args.p or (Fraction(1, 5),)), args.format)


def cmd_audit_cases(args) -> tuple[str, int]:
    rep = cases.audit_case_lemmas(args.t_range, args.case, workers=args.workers, cap_digits=args.cap_digits)
    if args.summary:
        print(json.dumps(rep.summary), file=sys.stderr)
    return _report(rep, args.format)


def cmd_enumerate(args) -> tuple[str, int]:
    classes = search.enumerate_maximal(args.n, args.r, args.t, cap=args.cap, workers=args.workers, cache_dir=args.cache_dir)
    rows = [{"class": k, "orbit_size": c.orbit_size, "size": len(c.canonical), "generators": [list(g) for g in c.generators]} for k, c in enumerate(classes)]
    if args.format == "json":
        obj = {"n": args.n, "r": args.r, "t": args.t, "class_count": len(classes), "classes": rows}
        return json.dumps(obj, indent=1) + "\n", EXIT_OK
    return _emit_rows([{**r, "generators": json.dumps(r["generators"])} for r in rows], args.format), EXIT_OK


def cmd_verify_recognition(args) -> tuple[str, int]:
    policies = args.policy or shifting.DEFAULT_POLICIES
    return _report(search.verify_recognition(args.n, args.r, args.t, args.i, policies, workers=args.workers), args.format)


def cmd_verify_stability(args) -> tuple[str, int]:
    rep = search.verify_stability(args.n, args.t, args.p or [Fraction(1, 5)], args.delta)
    return _report(rep, args.format)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threewise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=FORMATS, default="json")
        return p

    p = add("p0", cmd_p0, "crossover point p0(t), exact")
    p.add_argument("--t", type=int, required=True)

    p = add("measure", cmd_measure, "exact p-biased measure of a family")
    _add_family_args(p)
    p.add_argument("--p", type=_rational, action="append", help="rational a/b; repeatable")

    p = add("ratio-curve", cmd_ratio_curve, "max ratio mu(F_2)/mu(F_0) at p0 for a range of t")
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, required=True)

    p = add("shift", cmd_shift, "apply one shift or shift to a fixpoint")
    _add_family_args(p)
    p.add_argument("--pair", metavar="I,J", help="single shift s_IJ")
    p.add_argument("--policy", default="lex", help="lex, reverse-lex or random:SEED")

    p = add("closure", cmd_closure, "greedy (r,t)-maximal superfamily")
    _add_family_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--order", default="default")

    p = add("decompose", cmd_decompose, "s, h and hole families of a shifted 3-wise family")
    _add_family_args(p, t_required=True)

    p = add("audit-mifr", cmd_audit_mifr, "hole-family lemma and measure bound on one family")
    _add_family_args(p, t_required=True)
    p.add_argument("--p", type=_rational, action="append")

    p = add("audit-cases", cmd_audit_cases, "per-link audit of a case chain over a t range")
    p.add_argument("--case", required=True, choices=sorted(cases.CASE_ALIASES))
    p.add_argument("--t-range", type=_t_range, required=True, metavar="LO:HI")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cap-digits", type=int, default=DEFAULT_CAP_DIGITS)
    p.add_argument("--summary", action="store_true", help="print per-link summary to stderr")

    p = add("enumerate", cmd_enumerate, "(r,t)-maximal families up to isomorphism")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--cap", type=int, default=search.DEFAULT_ENUM_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None, help=f"defaults to ${search.CACHE_ENV} if set")

    p = add("verify-recognition", cmd_verify_recognition, "shifting into F_i^t(r) forces a copy of it")
    for flag in ("--n", "--r", "--t", "--i"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--policy", action="append", help="fixpoint policy; repeatable")
    p.add_argument("--workers", type=int, default=1)

    p = add("verify-stability", cmd_verify_stability, "stability trichotomy on all maximal classes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p", type=_rational, action="append")
    p.add_argument("--delta", type=_rational, default=Fraction(1, 10))
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = args.func(args)
    except (UsageError, CapExceeded, ValueError, OSError) as exc:
        print(f"threewise {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
