"""Exact tools for 3-wise t-intersecting families under the p-biased measure."""

from .audit import audit_MIFR, ekr_bound, h_param, hole_families, measure_bound_rhs, two_wise_s
from .cases import audit_case_lemmas
from .exact import BoundInterval, MeasurePolynomial, QuadraticValue, p0_of_t, parse_rational
from .families import (
    ExplicitFamily,
    WindowFamily,
    embeds_in_frontier_copy,
    frontier_family,
    is_r_wise_t_intersecting,
    lift,
    make_frontier,
    make_named_example,
    restrict,
)
from .measure import frontier_closed_form, frontier_profile, mu, ratio_F2_F0, ratio_max_at_p0
from .report import AuditReport, emit_report
from .search import canonicalize, enumerate_maximal, verify_recognition, verify_stability
from .shifting import is_maximal, is_shifted, maximal_closure, shift_fixpoint, shift_once

__all__ = [
    "BoundInterval",
    "MeasurePolynomial",
    "QuadraticValue",
    "p0_of_t",
    "parse_rational",
    "ExplicitFamily",
    "WindowFamily",
    "lift",
    "restrict",
    "make_frontier",
    "frontier_family",
    "make_named_example",
    "is_r_wise_t_intersecting",
    "embeds_in_frontier_copy",
    "mu",
    "frontier_closed_form",
    "frontier_profile",
    "ratio_F2_F0",
    "ratio_max_at_p0",
    "shift_once",
    "shift_fixpoint",
    "is_shifted",
    "maximal_closure",
    "is_maximal",
    "two_wise_s",
    "h_param",
    "hole_families",
    "measure_bound_rhs",
    "audit_MIFR",
    "ekr_bound",
    "audit_case_lemmas",
    "canonicalize",
    "enumerate_maximal",
    "verify_recognition",
    "verify_stability",
    "AuditReport",
    "emit_report",
]
