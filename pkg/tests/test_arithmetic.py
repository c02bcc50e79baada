"""Continued fractions, Bruno sums, Liouville schedules and Moser's check."""

import math
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.arithmetic import (
    BRUNO_LIKE,
    NON_BRUNO_LIKE,
    UNDECIDED,
    ContinuedFraction,
    MoserQuery,
    bruno_sum,
    cf_expand,
    convergents,
    make_liouville,
    moser_pair_check,
    parse_rotation_number,
)
from smalldiv.errors import (
    EmptyExpansion,
    InsufficientDepth,
    NotInUnitInterval,
    ScheduleOverflow,
)
from smalldiv.series.scalars import working_precision

PREC = 256


def fib(k):
    out = [1, 1]
    while len(out) < k:
        out.append(out[-1] + out[-2])
    return out


# frozen from direct float summation of log(F_{n+1}) / F_n over Fibonacci q_n
GOLDEN_BRUNO_60 = 3.28612970123114


def brute_moser(alpha, beta, gamma, tau, q_max):
    """Independent oracle over exact rationals (alpha irrational as a Fraction)."""
    for q in range(1, q_max + 1):
        da = abs(q * alpha - round(q * alpha))
        db = abs(q * beta - round(q * beta))
        if min(da, db) < Fraction(gamma) / Fraction(q) ** tau:
            return q
    return None


def golden_fraction():
    # 200-digit rational approximation of the golden mean, independent of gmpy2
    F = fib(400)
    return Fraction(F[-2], F[-1])


# -- continued fractions -----------------------------------------------------------
def test_golden_quotients_are_ones():
    g = parse_rotation_number("golden", PREC)
    assert cf_expand(g.value, 10, PREC).quotients == (1,) * 10


def test_sqrt2_quotients_are_twos():
    r = parse_rotation_number("sqrt2m1", PREC)
    assert cf_expand(r.value, 8, PREC).quotients == (2,) * 8


def test_pi_quotients():
    with working_precision(PREC):
        x = gmpy2.const_pi() - 3
    assert cf_expand(x, 4, PREC).quotients == (7, 15, 1, 292)


def test_expansion_reports_precision_exhaustion():
    cf = cf_expand(mpfr(Fraction(3, 7).numerator) / 7, 10, 64)
    assert cf.precision_exhausted
    assert cf.depth < 10


def test_cf_expand_outside_unit_interval():
    with pytest.raises(NotInUnitInterval):
        cf_expand(mpfr("1.5"), 3, PREC)


def test_convergents_known_values():
    assert convergents(ContinuedFraction(0, (7, 15, 1))) == [(1, 7), (15, 106), (16, 113)]
    assert convergents(ContinuedFraction(0, (5,))) == [(1, 5)]
    qs = [q for _, q in convergents(ContinuedFraction(0, (1,) * 12))]
    assert qs == fib(13)[1:]
    with pytest.raises(EmptyExpansion):
        convergents(ContinuedFraction(0, ()))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=12))
def test_convergent_recurrence_and_coprimality(quotients):
    conv = convergents(ContinuedFraction(0, tuple(quotients)))
    for p, q in conv:
        assert math.gcd(p, q) == 1
    qs = [q for _, q in conv]
    assert all(b > a for a, b in zip(qs[1:], qs[2:]))
    value = Fraction(conv[-1][0], conv[-1][1])
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    assert value == x


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=6, max_size=14))
def test_convergent_quality(quotients):
    # irrational completion by a golden tail keeps every listed quotient
    lit = "[0;" + ",".join(map(str, quotients)) + ",...]"
    rot = parse_rotation_number(lit, PREC)
    cf = rot.continued_fraction(len(quotients))
    conv = convergents(cf)
    with working_precision(PREC):
        for (p, q), (_, q_next) in zip(conv, conv[1:]):
            assert abs(q * rot.value - p) < mpfr(1) / q_next
            assert abs(rot.value - mpfr(p) / q) <= mpfr(1) / (q * q_next)


def test_reconstruction_within_two_over_q_squared():
    rot = parse_rotation_number("[0;3,1,4,1,5]", PREC)
    assert rot.exact == Fraction(1, 1) / (3 + 1 / (1 + 1 / (4 + 1 / (1 + Fraction(1, 5)))))
    cf = rot.continued_fraction(5)
    p, q = convergents(cf)[-1]
    with working_precision(PREC):
        assert abs(rot.value - mpfr(p) / q) <= 2 / mpfr(q) ** 2


# -- Bruno sums -----------------------------------------------------------------------
def test_golden_bruno_sum_matches_fibonacci_oracle():
    cf = parse_rotation_number("golden", PREC).continued_fraction(61)
    r60 = bruno_sum(cf, 60)
    r40 = bruno_sum(cf, 40)
    F = fib(70)
    oracle = sum(math.log(F[n + 1]) / F[n] for n in range(60))
    assert abs(float(r60.partial_sum) - oracle) < 1e-12
    assert abs(float(r60.partial_sum) - GOLDEN_BRUNO_60) < 1e-12
    assert abs(r60.partial_sum - r40.partial_sum) < 1e-6
    assert r60.verdict == BRUNO_LIKE


def test_bruno_depth_zero():
    r = bruno_sum(ContinuedFraction(0, (1, 1)), 0)
    assert r.partial_sum == 0
    assert r.verdict == UNDECIDED


def test_bruno_requires_depth():
    with pytest.raises(InsufficientDepth):
        bruno_sum(ContinuedFraction(0, (1, 1, 1)), 3)


def test_fast_schedule_is_non_bruno_like():
    # a_{k+1} = 10^{q_k}: the only quotients inside the digit budget
    cf = make_liouville("a=10^q", 2)
    assert cf.quotients == (10, 10**10)
    # q = 1, 10, 10^11 + 1 and log q_{n+1} / q_n >= log 10 for both terms
    r = bruno_sum(ContinuedFraction(0, cf.quotients + (1,)), 2)
    assert all(t >= math.log(10) - 1e-12 for t in r.terms)
    assert r.verdict == NON_BRUNO_LIKE


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 1000), min_size=2, max_size=20))
def test_bruno_monotone_in_depth(quotients):
    cf = ContinuedFraction(0, tuple(quotients))
    sums = [bruno_sum(cf, d).partial_sum for d in range(cf.depth)]
    assert all(b >= a for a, b in zip(sums, sums[1:]))


# -- schedules -----------------------------------------------------------------
def test_constant_schedule_is_golden():
    assert make_liouville("a=1", 8).quotients == (1,) * 8
    g = parse_rotation_number("sched:a=1", PREC)
    with working_precision(PREC):
        assert abs(g.value - (gmpy2.sqrt(mpfr(5)) - 1) / 2) < mpfr(2) ** -200


def test_tower_schedule_overflows_with_depth():
    with pytest.raises(ScheduleOverflow) as info:
        make_liouville("a=10^q", 4)
    assert info.value.reached_depth == 2


def test_self_power_schedule():
    cf = make_liouville("a=q^q", 3)
    assert cf.quotients == (1, 1, 4)
    qs = [q for _, q in convergents(cf)]
    assert qs == [1, 2, 9]
    deeper = make_liouville("a=q^q", 4)
    assert deeper.quotients[-1] == 9**9
    q_next = convergents(deeper)[-1][1]
    assert q_next >= 9**9 * 9
    # the Bruno term at the new denominator is about log q_n
    assert math.log(q_next) / 9 >= math.log(9) - 1e-9


def test_schedule_growth_property():
    cf = make_liouville("a=2^q", 4)
    q_prev, q = 0, 1
    for a in cf.quotients:
        q_next = a * q + q_prev
        assert q_next >= 2**q * q
        q_prev, q = q, q_next


# -- rotation literals ----------------------------------------------------------
@pytest.mark.parametrize("lit,value", [("0.25", Fraction(1, 4)), ("3/8", Fraction(3, 8))])
def test_rational_literals(lit, value):
    r = parse_rotation_number(lit, PREC)
    assert r.exact == value
    assert r.is_rational


def test_multiplier_on_unit_circle():
    g = parse_rotation_number("golden", PREC)
    with working_precision(PREC):
        assert abs(abs(g.multiplier()) - 1) < mpfr(2) ** -200


# -- Moser ----------------------------------------------------------------------------
def test_moser_golden_pair_holds():
    g = parse_rotation_number("golden", PREC)
    res = moser_pair_check(MoserQuery(g, g, 0.2, 2, 10**4))
    assert res.holds and res.witness is None


def test_moser_rational_beta_witness():
    g = parse_rotation_number("golden", PREC)
    b = parse_rotation_number("3/8", PREC)
    res = moser_pair_check(MoserQuery(g, b, 0.1, 1, 100))
    assert not res.holds
    assert res.witness == (8, 5, 3)
    assert brute_moser(golden_fraction(), Fraction(3, 8), Fraction(1, 10), 1, 100) == 8


def test_moser_huge_gamma_fails_at_one():
    g = parse_rotation_number("golden", PREC)
    r = parse_rotation_number("sqrt2m1", PREC)
    res = moser_pair_check(MoserQuery(g, r, 10, 1, 1))
    assert res.witness[0] == 1


def test_moser_query_validation():
    g = parse_rotation_number("golden", PREC)
    with pytest.raises(ValueError):
        MoserQuery(g, g, 0, 1, 10)
    with pytest.raises(ValueError):
        MoserQuery(g, g, 1, 1, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.01, 0.5), st.integers(1, 3), st.integers(1, 200))
def test_moser_matches_oracle_and_prefix_monotone(num, den, gamma, tau, q_max):
    beta_frac = Fraction(num % den, den) if num % den else Fraction(1, den + 1)
    g = parse_rotation_number("golden", PREC)
    b = parse_rotation_number(f"{beta_frac.numerator}/{beta_frac.denominator}", PREC)
    res = moser_pair_check(MoserQuery(g, b, gamma, tau, q_max))
    oracle = brute_moser(golden_fraction(), beta_frac, Fraction(gamma), tau, q_max)
    assert (res.witness[0] if res.witness else None) == oracle
    if res.holds:
        for q in (1, q_max // 2 or 1):
            assert moser_pair_check(MoserQuery(g, b, gamma, tau, q)).holds
