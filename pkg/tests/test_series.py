"""Truncated series: ring arithmetic, composition, reversion and literals."""

from fractions import Fraction

import math

import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.errors import InnerHasConstantTerm, RingMismatch, TruncationTooShort
from smalldiv.series import (
    MultiSeries,
    ParamPoly,
    ParamRing,
    ScalarRing,
    TruncSeries,
    compose,
    multi_arith,
    multi_compose,
    parse_complex,
    revert,
    series_arith,
    tolerance,
    working_precision,
)
from smalldiv.series.literals import parse_any_series, series_to_literal
from smalldiv.series.scalars import format_complex

PREC = 256
RING = ScalarRing(PREC)


def S(coeffs, order=None, ring=RING):
    return TruncSeries.from_coeffs(coeffs, order=order, ring=ring)


def close(a, b, rel=None):
    rel = rel or tolerance(PREC)
    with working_precision(PREC):
        scale = max([mpfr(1)] + [abs(x) for x in a.coeffs] + [abs(x) for x in b.coeffs])
        return all(abs(x - y) <= rel * scale for x, y in zip(a.coeffs, b.coeffs))


small = st.integers(min_value=-5, max_value=5)
germ_coeffs = st.lists(small, min_size=1, max_size=6)


def germ(cs, order=8):
    # valuation >= 1: c_0 = 0
    return S({n + 1: c for n, c in enumerate(cs)}, order=order)


# -- closed forms --------------------------------------------------------------
def test_add_and_multiply():
    z = S({1: 1}, order=3)
    z2 = S({2: 1}, order=3)
    assert series_arith("add", z, z2).equals(S({1: 1, 2: 1}, order=3))
    assert series_arith("multiply", series_arith("add", z, z2), z, 3).equals(S({2: 1, 3: 1}, order=3))


def test_scale_over_parameter_ring():
    ring = ParamRing(1, PREC)
    z2 = TruncSeries.from_coeffs({2: 1}, order=4, ring=ring)
    t = ParamPoly.variable(0, 1, PREC)
    out = series_arith("scale", z2, t)
    assert out.coeffs[2].degree == 1
    assert out.coeffs[2].coefficient((1,)) == 1


def test_compose_identity_and_scaling():
    f = S({1: 1, 2: 1}, order=5)
    assert compose(f, S({1: 1}, order=5)).equals(f)
    assert compose(S({2: 1}, order=4), S({1: 2}, order=4)).equals(S({2: 4}, order=4))


def test_compose_log_closed_form():
    N = 6
    with working_precision(PREC):
        log1p = S({n: mpc((-1) ** (n - 1)) / n for n in range(1, N + 1)}, order=N)
        out = compose(log1p, S({1: 2, 2: 1}, order=N), N)
        target = series_arith("scale", log1p, 2)
    assert close(out, target)


def test_compose_rejects_constant_term():
    with pytest.raises(InnerHasConstantTerm):
        compose(S({1: 1}, order=3), S({0: 1, 1: 1}, order=3))


def test_truncation_errors():
    with pytest.raises(TruncationTooShort):
        series_arith("add", S({1: 1}, order=2), S({1: 1}, order=5), 4)
    with pytest.raises(RingMismatch):
        series_arith("add", S({1: 1}, order=2), 3)


def test_revert_geometric():
    # z / (1 - z) has inverse z / (1 + z)
    N = 10
    h = S({n: 1 for n in range(1, N + 1)}, order=N)
    inv = revert(h, N)
    assert close(inv, S({n: (-1) ** (n - 1) for n in range(1, N + 1)}, order=N))
    assert close(compose(h, inv, N), S({1: 1}, order=N))


# -- properties ----------------------------------------------------------------
@settings(max_examples=40, deadline=None)
@given(germ_coeffs, germ_coeffs, germ_coeffs)
def test_ring_axioms(a, b, c):
    A, B, C = germ(a), germ(b), germ(c)
    ab_c = series_arith("multiply", series_arith("multiply", A, B), C)
    a_bc = series_arith("multiply", A, series_arith("multiply", B, C))
    assert close(ab_c, a_bc)
    left = series_arith("multiply", A, series_arith("add", B, C))
    right = series_arith("add", series_arith("multiply", A, B), series_arith("multiply", A, C))
    assert close(left, right)
    assert series_arith("add", A, B).equals(series_arith("add", B, A))


@settings(max_examples=30, deadline=None)
@given(germ_coeffs, germ_coeffs, germ_coeffs)
def test_compose_associative(a, b, c):
    A, B, C = germ(a), germ(b), germ(c)
    lhs = compose(compose(A, B), C)
    rhs = compose(A, compose(B, C))
    assert close(lhs, rhs)


@settings(max_examples=30, deadline=None)
@given(germ_coeffs, germ_coeffs)
def test_truncation_consistency(a, b):
    A, B = germ(a, order=12), germ(b, order=12)
    long = compose(A, B, 12).truncate(6)
    short = compose(A.truncate(6), B.truncate(6), 6)
    assert long.equals(short)
    assert series_arith("multiply", A, B, 12).truncate(6).equals(
        series_arith("multiply", A.truncate(6), B.truncate(6), 6)
    )


@settings(max_examples=25, deadline=None)
@given(st.lists(small, min_size=1, max_size=4), st.lists(small, min_size=1, max_size=4),
       st.integers(-3, 3), st.integers(-3, 3))
def test_evaluation_is_a_homomorphism(p, q, tre, tim):
    ring = ParamRing(1, PREC)
    tvar = ParamPoly.variable(0, 1, PREC)
    with working_precision(PREC):
        outer = TruncSeries.from_coeffs(
            {n + 1: tvar.scale(c) + ParamPoly.constant(1, 1, PREC) for n, c in enumerate(p)},
            order=6, ring=ring,
        )
        inner = TruncSeries.from_coeffs(
            {1: ParamPoly.constant(1, 1, PREC)} | {n + 2: tvar.scale(c) for n, c in enumerate(q)},
            order=6, ring=ring,
        )
        t = (mpc(tre, tim),)
        symbolic = compose(outer, inner, 6).evaluate_params(t)
        numeric = compose(outer.evaluate_params(t), inner.evaluate_params(t), 6)
    assert close(symbolic, numeric)


@settings(max_examples=25, deadline=None)
@given(st.lists(small, min_size=1, max_size=5))
def test_revert_roundtrip(cs):
    h = S({1: 1} | {n + 2: c for n, c in enumerate(cs)}, order=9)
    k = revert(h, 9)
    assert close(compose(h, k, 9), S({1: 1}, order=9))
    assert close(compose(k, h, 9), S({1: 1}, order=9))


def test_parampoly_exact_arithmetic():
    t = ParamPoly.variable(0, 2, PREC)
    s = ParamPoly.variable(1, 2, PREC)
    with working_precision(PREC):
        p = (t + s) * (t - s)
        q = t * t - s * s
    assert p == q
    assert p.degree == 2
    with working_precision(PREC):
        assert (p - q).degree == -math.inf


# -- multivariate --------------------------------------------------------------
def test_multi_compose_identity_and_linear():
    F = MultiSeries.from_components([{(1, 0): 2, (0, 2): 1}, {(0, 1): 3}], order=4, ring=RING)
    ident = MultiSeries.identity(2, 4, RING)
    assert multi_compose(F, ident, 4).equals(F)
    assert multi_compose(ident, F, 4).equals(F)
    lin = MultiSeries.linear([2, 3], 4, RING)
    out = multi_compose(F, lin, 4)
    # z2^2 -> 9 z2^2
    assert out.coefficient(0, (0, 2)) == 9


@settings(max_examples=20, deadline=None)
@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_multi_compose_associative(a, b):
    def field(c):
        return MultiSeries.from_components(
            [{(1, 0): 1, (2, 0): c[0], (1, 1): c[1]}, {(0, 1): 1, (0, 2): c[2]}], order=5, ring=RING
        )

    A, B = field(a), field(b)
    C = field([b[2], a[0], a[1]])
    lhs = multi_compose(multi_compose(A, B, 5), C, 5)
    rhs = multi_compose(A, multi_compose(B, C, 5), 5)
    diff = multi_arith("sub", lhs, rhs)
    assert diff.max_abs() <= tolerance(PREC) * max(mpfr(1), lhs.max_abs())


# -- literals ------------------------------------------------------------------
def test_complex_literal_roundtrip():
    z = parse_complex("1.5-2.25i", PREC)
    assert z == mpc("1.5-2.25j")
    assert parse_complex(format_complex(z), PREC) == z
    assert parse_complex("i", PREC) == mpc(0, 1)


def test_series_literal_roundtrip():
    lit = {"1": "2", "2": "1+0.5i"}
    s = parse_any_series(lit, order=4, prec=PREC)
    assert s.order == 4
    assert parse_any_series(series_to_literal(s), order=4, prec=PREC).equals(s)
    m = parse_any_series([{"2,1": "1"}, {"0,1": "-1"}], prec=PREC)
    assert m.coefficient(0, (2, 1)) == 1


def test_exact_rational_coefficients_survive():
    with working_precision(PREC):
        third = mpc(1) / 3
    s = S({1: third}, order=1)
    with working_precision(PREC):
        err = abs(s.coeffs[1] - mpfr(Fraction(1, 3)))
    assert err < mpfr(2) ** -250
