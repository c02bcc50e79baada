"""Series literals used by config files.

A one-variable series is a map from exponent strings to complex strings,
``{"1": "2", "2": "1"}``.  A multivariate map is a list with one such map per
component, keyed by multi-index strings ``"i,j"``.
"""

from __future__ import annotations

from .multivariate import MultiSeries
from .parampoly import ScalarRing
from .scalars import DEFAULT_PREC, format_complex, parse_complex
from .univariate import TruncSeries


def parse_index(text):
    return tuple(int(p) for p in str(text).split(","))


def format_index(index):
    return ",".join(str(e) for e in index)


def parse_series(literal, order=None, prec=DEFAULT_PREC):
    ring = ScalarRing(prec)
    coeffs = {int(k): parse_complex(str(v), prec) for k, v in literal.items()}
    return TruncSeries.from_coeffs(coeffs, order=order, ring=ring)


def parse_multiseries(literal, nvars=None, order=None, prec=DEFAULT_PREC):
    comps = [{parse_index(k): parse_complex(str(v), prec) for k, v in comp.items()} for comp in literal]
    nvars = nvars or len(comps)
    return MultiSeries.from_components(comps, nvars=nvars, order=order, ring=ScalarRing(prec))


def parse_any_series(literal, order=None, prec=DEFAULT_PREC):
    if isinstance(literal, list):
        return parse_multiseries(literal, order=order, prec=prec)
    return parse_series(literal, order=order, prec=prec)


def series_to_literal(s, digits=20):
    if isinstance(s, MultiSeries):
        return [{format_index(k): format_complex(v, digits) for k, v in comp.items()} for comp in s.components]
    return {str(n): format_complex(c, digits) for n, c in enumerate(s.coeffs) if not s.ring.is_zero(c)}
