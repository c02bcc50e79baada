"""Formal centralizer candidates and commutator residuals."""

from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.arithmetic import RotationNumber, parse_rotation_number
from smalldiv.centralizer import centralizer_candidate, commutator_residual, rotation_number_of
from smalldiv.linearization import EigenData
from smalldiv.series import ScalarRing, TruncSeries, compose, tolerance, working_precision

PREC = 256
RING = ScalarRing(PREC)
ALPHA = parse_rotation_number("golden", PREC)
EIG = EigenData.from_angles([ALPHA], PREC)


def quad(mult, N):
    return TruncSeries.from_coeffs({1: mult, 2: 1}, order=N, ring=RING)


F = quad(EIG.values[0], 32)


def max_dev(a, b):
    with working_precision(PREC):
        return max(abs(x - y) for x, y in zip(a.coeffs, b.coeffs))


def scale(*series):
    with working_precision(PREC):
        return max([mpfr(1)] + [s.max_abs() for s in series])


def test_beta_equal_alpha_reproduces_f():
    probe = centralizer_candidate(F, ALPHA, ALPHA, 32)
    assert max_dev(probe.g, F) <= tolerance(PREC) * scale(probe.g)


def test_beta_zero_is_identity():
    probe = centralizer_candidate(F, ALPHA, "0", 32)
    assert max_dev(probe.g, TruncSeries.identity(32, RING)) <= tolerance(PREC)


def test_half_turn_candidate():
    probe = centralizer_candidate(F, ALPHA, "1/2", 32)
    with working_precision(PREC):
        assert abs(probe.multiplier + 1) < tolerance(PREC)
    assert probe.residual <= tolerance(PREC) * scale(probe.g)
    assert abs(rotation_number_of(probe.g) - mpfr("0.5")) < tolerance(PREC)
    assert probe.growth is not None


def test_commutator_trivial_cases():
    assert commutator_residual(F, F, 32) == 0
    assert commutator_residual(F, TruncSeries.identity(32, RING), 32) == 0


def test_two_quadratics_order_two():
    lam = EIG.values[0]
    mu = parse_rotation_number("sqrt2m1", PREC).multiplier(PREC)
    res = commutator_residual(quad(lam, 4), quad(mu, 4), 4)
    with working_precision(PREC):
        want = abs((lam - mu) * (lam + mu - 1))
        assert abs(res - want) <= tolerance(PREC)


def test_moser_attached_when_requested():
    probe = centralizer_candidate(F, ALPHA, "1/2", 16, moser=(0.2, 2, 100))
    assert probe.moser is not None and not probe.moser.holds
    assert probe.moser.witness[0] == 2


def test_integer_multiple_of_alpha_is_iterate():
    N = 20
    f = F.truncate(N)
    with working_precision(PREC):
        value = 2 * ALPHA.value - 1
    beta = RotationNumber(value, PREC, "test", "2*golden-1", None, None, "2golden")
    probe = centralizer_candidate(f, ALPHA, beta, N)
    ff = compose(f, f, N)
    assert max_dev(probe.g, ff) <= tolerance(PREC) * scale(ff)


@settings(max_examples=6, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7))
def test_group_closure(k1, k2):
    N = 16
    f = F.truncate(N)
    b1, b2 = f"{k1}/17", f"{k2}/17"
    g1 = centralizer_candidate(f, ALPHA, b1, N).g
    g2 = centralizer_candidate(f, ALPHA, b2, N).g
    g12 = centralizer_candidate(f, ALPHA, f"{k1 + k2}/17", N).g
    comp = compose(g1, g2, N)
    assert max_dev(comp, g12) <= tolerance(PREC) * scale(comp, g12)
    assert commutator_residual(f, g12, N) <= tolerance(PREC) * scale(g12)


def test_numeric_multiplier_input():
    lam = mpc("0.6+0.2j")
    f = quad(lam, 12)
    probe = centralizer_candidate(f, lam, "1/4", 12)
    assert probe.alpha is None
    assert probe.residual <= tolerance(PREC) * scale(probe.g)
