"""Germ linearization, resonance detection and domain classification."""

from fractions import Fraction

import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.arithmetic import parse_rotation_number
from smalldiv.errors import DimensionMismatch, ObstructionNonzero, ResonantDivisor
from smalldiv.linearization import (
    RESONANT_ZERO,
    Domain,
    EigenData,
    classify_domain,
    conjugacy_residual,
    detect_resonances,
    linearize_germ_1d,
    linearize_germ_nd,
)
from smalldiv.series import MultiSeries, ScalarRing, TruncSeries, compose, revert, tolerance, working_precision

PREC = 256
RING = ScalarRing(PREC)
GOLDEN = EigenData.from_angles(["golden"], PREC)


def germ(lam_value, coeffs, N):
    c = {1: lam_value} | dict(coeffs)
    return TruncSeries.from_coeffs(c, order=N, ring=RING)


def rel_err(x, y):
    with working_precision(PREC):
        return abs(x - y) / max(abs(y), mpfr(2) ** -PREC)


# -- closed forms --------------------------------------------------------------
def test_log_closed_form_small_order():
    h, log = linearize_germ_1d(germ(2, {2: 1}, 6), 2, 6)
    for n in range(1, 7):
        with working_precision(PREC):
            exact = mpc(mpfr(Fraction((-1) ** (n - 1), n)))
        assert rel_err(h.coeffs[n], exact) < mpfr(2) ** -200
    # divisors lambda^l - lambda for lambda = 2
    assert [e.magnitude for e in log.entries] == [2, 6, 14, 30, 62]


def test_golden_second_coefficient():
    lam = GOLDEN.values[0]
    h, _ = linearize_germ_1d(germ(lam, {2: 1}, 4), GOLDEN, 4)
    with working_precision(PREC):
        expected = 1 / (lam - lam * lam)
    assert rel_err(h.coeffs[2], expected) < tolerance(PREC)


def test_third_root_of_unity_is_resonant_at_order_four():
    eig = EigenData.from_angles(["1/3"], PREC)
    with pytest.raises(ResonantDivisor) as info:
        linearize_germ_1d(germ(eig.values[0], {2: 1}, 8), eig, 8)
    assert info.value.index == (4,)
    assert info.value.component == 0


def test_resonant_obstruction_nonzero():
    eig = EigenData.from_angles(["1/3"], PREC)
    with pytest.raises(ObstructionNonzero) as info:
        linearize_germ_1d(germ(eig.values[0], {2: 1}, 8), eig, 8, RESONANT_ZERO)
    assert info.value.index == (4,)


def test_resonant_convention_on_conjugated_rotation():
    # f = k o (lambda z) o k^{-1} is linearizable, so every obstruction vanishes
    eig = EigenData.from_angles(["1/3"], PREC)
    lam = eig.values[0]
    N = 12
    k = TruncSeries.from_coeffs({1: 1, 2: 1, 3: mpc("0.5")}, order=N, ring=RING)
    with working_precision(PREC):
        f = compose(k, compose(TruncSeries.from_coeffs({1: lam}, order=N, ring=RING), revert(k, N), N), N)
    h, _ = linearize_germ_1d(f, eig, N, RESONANT_ZERO)
    for n in (4, 7, 10):
        assert h.coeffs[n] == 0
    assert conjugacy_residual(h, f, eig, N) <= tolerance(PREC) * max(mpfr(1), h.max_abs())


def test_rejects_mismatched_linear_part():
    with pytest.raises(ValueError):
        linearize_germ_1d(germ(3, {2: 1}, 4), 2, 4)


# -- multivariate ---------------------------------------------------------------
def test_nd_linear_germ_gives_identity():
    eig = EigenData.from_rationals([2, 3], PREC)
    F = MultiSeries.linear([2, 3], 5, RING)
    H, _ = linearize_germ_nd(F, eig, 5)
    assert H.equals(MultiSeries.identity(2, 5, RING))


def test_nd_hand_coefficient():
    eig = EigenData.from_rationals([2, 3], PREC)
    F = MultiSeries.from_components([{(1, 0): 2, (0, 2): 1}, {(0, 1): 3}], order=4, ring=RING)
    H, _ = linearize_germ_nd(F, eig, 4)
    c = H.coefficient(0, (0, 2))
    assert rel_err(abs(c), mpfr(1) / 7) < mpfr(2) ** -200
    assert conjugacy_residual(H, F, eig, 4) < mpfr(2) ** -200


def test_nd_resonance_detected():
    eig = EigenData.from_rationals([4, 2], PREC)
    F = MultiSeries.from_components([{(1, 0): 4, (0, 2): 1}, {(0, 1): 2}], order=4, ring=RING)
    with pytest.raises(ResonantDivisor) as info:
        linearize_germ_nd(F, eig, 4)
    # lambda_2^2 = lambda_1: the first component (0-based index 0)
    assert info.value.index == (0, 2)
    assert info.value.component == 0


def test_nd_dimension_mismatch():
    eig = EigenData.from_rationals([2, 3, 5], PREC)
    F = MultiSeries.linear([2, 3], 3, RING)
    with pytest.raises(DimensionMismatch):
        linearize_germ_nd(F, eig, 3)


# -- resonances and domains --------------------------------------------------------------
def test_detect_resonances_exact_rationals():
    res = detect_resonances(EigenData.from_rationals([Fraction(1, 2), Fraction(1, 4)], PREC), 3)
    assert list(res) == [((2, 0), 1)]
    assert res.numeric_only == (False,)


def test_detect_resonances_irrational_angle():
    assert len(detect_resonances(GOLDEN, 50)) == 0


def test_detect_resonances_fifth_root():
    res = detect_resonances(EigenData.from_angles(["1/5"], PREC), 12)
    assert list(res) == [((6,), 0), ((11,), 0)]


def test_numeric_resonance_flagged():
    eig = EigenData.numeric([mpc(-1)], PREC)
    res = detect_resonances(eig, 4)
    assert list(res) == [((3,), 0)]
    assert res.numeric_only == (True,)


@pytest.mark.parametrize(
    "eig,domain",
    [
        (EigenData.from_rationals([3, 5], PREC), Domain.POINCARE),
        (GOLDEN, Domain.SIEGEL),
        (EigenData.from_rationals([2, Fraction(1, 2)], PREC), Domain.SIEGEL),
        (EigenData.from_rationals([Fraction(1, 3), Fraction(1, 2)], PREC), Domain.POINCARE),
    ],
)
def test_classify_domain(eig, domain):
    assert classify_domain(eig) == domain


# -- residual -------------------------------------------------------------------------
def test_identity_residual_is_the_nonlinearity():
    f = germ(GOLDEN.values[0], {2: 1}, 4)
    ident = TruncSeries.identity(4, RING)
    assert conjugacy_residual(ident, f, GOLDEN, 4) == 1


def test_residual_truncation_mismatch():
    f = germ(2, {2: 1}, 4)
    h, _ = linearize_germ_1d(f, 2, 4)
    with pytest.raises(DimensionMismatch):
        conjugacy_residual(h, f.truncate(3), 2, 4)


# -- properties -------------------------------------------------------------------------
coeff = st.integers(-4, 4)


@settings(max_examples=20, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=4), st.sampled_from(["golden", "sqrt2m1", "2", "numeric"]))
def test_residual_valuation_and_determinism(cs, which):
    if which in ("golden", "sqrt2m1"):
        eig = EigenData.from_angles([which], PREC)
    elif which == "2":
        eig = EigenData.from_rationals([2], PREC)
    else:
        eig = EigenData.numeric([mpc("0.3+0.1j")], PREC)
    N = 24
    terms = {n + 2: c for n, c in enumerate(cs)}
    f = germ(eig.values[0], terms, N)
    h, _ = linearize_germ_1d(f, eig, N)
    assert h.coeffs[0] == 0 and h.coeffs[1] == 1
    assert conjugacy_residual(h, f, eig, N) <= tolerance(PREC) * max(mpfr(1), h.max_abs())
    # insertion order of the literal does not change a bit
    f2 = TruncSeries.from_coeffs(dict(reversed(list(({1: eig.values[0]} | terms).items()))), order=N, ring=RING)
    h2, _ = linearize_germ_1d(f2, eig, N)
    assert h2.coeffs == h.coeffs


@settings(max_examples=10, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=4))
def test_poincare_divisors_bounded_below(cs):
    eig = EigenData.from_rationals([3, 5], PREC)
    F = MultiSeries.from_components(
        [{(1, 0): 3, (0, 2): cs[0], (1, 1): cs[1]}, {(0, 1): 5, (2, 0): cs[-1]}], order=8, ring=RING
    )
    _, log = linearize_germ_nd(F, eig, 8)
    # |lambda^I - lambda_j| >= min(9 - 5, 15 - 3) for |I| >= 2
    assert all(e.magnitude >= 4 for e in log.entries)


def test_precision_guard_agrees_with_higher_precision():
    N = 200
    f = germ(GOLDEN.values[0], {2: 1}, N)
    h, _ = linearize_germ_1d(f, GOLDEN, N)
    eig2 = GOLDEN.with_prec(2 * PREC)
    ring2 = ScalarRing(2 * PREC)
    f2 = TruncSeries.from_coeffs({1: eig2.values[0], 2: 1}, order=N, ring=ring2)
    h2, _ = linearize_germ_1d(f2, eig2, N)
    with working_precision(2 * PREC):
        worst = max(abs(a - b) / abs(b) for a, b in zip(h.coeffs[1:], h2.coeffs[1:]))
    assert worst <= mpfr(2) ** -(PREC - 8)


def test_rotation_number_literal_as_multiplier():
    rot = parse_rotation_number("golden", PREC)
    f = germ(GOLDEN.values[0], {2: 1}, 8)
    h1, _ = linearize_germ_1d(f, rot, 8)
    h2, _ = linearize_germ_1d(f, GOLDEN, 8)
    assert h1.coeffs == h2.coeffs
