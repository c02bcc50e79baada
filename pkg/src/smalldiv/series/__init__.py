"""Truncated formal power series over pluggable coefficient rings."""

from .multivariate import MultiSeries, jacobian_apply, monomials, multi_arith, multi_compose
from .parampoly import ParamPoly, ParamRing, ScalarRing, common_ring
from .scalars import (
    DEFAULT_PREC,
    BigComplex,
    format_complex,
    parse_complex,
    to_big,
    tolerance,
    unit_circle,
    working_precision,
)
from .univariate import TruncSeries, compose, revert, series_arith

__all__ = [
    "DEFAULT_PREC",
    "BigComplex",
    "MultiSeries",
    "ParamPoly",
    "ParamRing",
    "ScalarRing",
    "TruncSeries",
    "common_ring",
    "compose",
    "format_complex",
    "jacobian_apply",
    "monomials",
    "multi_arith",
    "multi_compose",
    "parse_complex",
    "revert",
    "series_arith",
    "to_big",
    "tolerance",
    "unit_circle",
    "working_precision",
]
