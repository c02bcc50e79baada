"""Formal linearization of germs with diagonal linear part.

Solves ``h o f = A o h`` order by order, where ``A = diag(lambda)`` and ``h``
is tangent to the identity.  At order ``I`` (component ``j``) the unknown
coefficient is the accumulated lower-order contribution divided by the small
divisor ``lambda^I - lambda_j``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpc, mpfr

from .arithmetic import RotationNumber, parse_rotation_number
from .errors import (
    DimensionMismatch,
    ObstructionNonzero,
    PrecisionDisagreement,
    ResonantDivisor,
    TruncationTooShort,
)
from .series.multivariate import MonomialPowers, MultiSeries, _clean, monomials, multi_compose, unit_index
from .series.parampoly import ParamPoly
from .series.scalars import DEFAULT_PREC, parse_complex, to_big, tolerance, working_precision
from .series.univariate import TruncSeries, _mul_trunc, compose

EXACT = "exact"
ANGLE = "angle"
NUMERIC = "numeric"

RESONANT_ERROR = "error"
RESONANT_ZERO = "zero-if-obstruction-vanishes"
_CONVENTIONS = (RESONANT_ERROR, RESONANT_ZERO)


class Domain(str, enum.Enum):
    POINCARE = "Poincare"
    SIEGEL = "Siegel"


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"{x!r} is not an exact rational")


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues of the diagonal linear part, with exactness tags.

    ``tags[k]`` is ``"exact"`` (``exact[k]`` is a Fraction), ``"angle"``
    (``exact[k]`` is a :class:`RotationNumber`, value ``exp(2 pi i angle)``)
    or ``"numeric"`` (``exact[k]`` is None).
    """

    values: tuple
    tags: tuple
    exact: tuple
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if not (len(self.values) == len(self.tags) == len(self.exact)) or not self.values:
            raise DimensionMismatch("eigen data fields must have equal, positive length")
        for v in self.values:
            if gmpy2.is_zero(v):
                raise ValueError("eigenvalues must be nonzero (A must be invertible)")

    @classmethod
    def from_angles(cls, angles, prec=DEFAULT_PREC):
        rots = [a if isinstance(a, RotationNumber) else parse_rotation_number(a, prec) for a in angles]
        values = tuple(r.multiplier(prec) for r in rots)
        return cls(values, (ANGLE,) * len(rots), tuple(rots), prec)

    @classmethod
    def from_rationals(cls, values, prec=DEFAULT_PREC):
        fr = tuple(_as_fraction(v) for v in values)
        return cls(tuple(to_big(f, prec) for f in fr), (EXACT,) * len(fr), fr, prec)

    @classmethod
    def numeric(cls, values, prec=DEFAULT_PREC):
        vals = tuple(to_big(v, prec) for v in values)
        return cls(vals, (NUMERIC,) * len(vals), (None,) * len(vals), prec)

    @classmethod
    def from_literals(cls, items, prec=DEFAULT_PREC):
        """Config form: ``{"angle": lit}``, ``{"value": "p/q"}`` or ``{"complex": "a+bi"}``."""
        values, tags, exact = [], [], []
        for item in items:
            if "angle" in item:
                r = parse_rotation_number(item["angle"], prec)
                values.append(r.multiplier(prec))
                tags.append(ANGLE)
                exact.append(r)
            elif "value" in item:
                f = _as_fraction(str(item["value"]))
                values.append(to_big(f, prec))
                tags.append(EXACT)
                exact.append(f)
            elif "complex" in item:
                values.append(parse_complex(str(item["complex"]), prec))
                tags.append(NUMERIC)
                exact.append(None)
            else:
                raise ValueError(f"cannot read eigenvalue entry {item!r}")
        return cls(tuple(values), tuple(tags), tuple(exact), prec)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def with_prec(self, prec):
        """Re-derive the values at another working precision."""
        if self.prec == prec:
            return self
        values, exact = [], []
        for v, tag, ex in zip(self.values, self.tags, self.exact):
            if tag == ANGLE:
                ex = parse_rotation_number(ex.exact if ex.exact is not None else ex.literal, prec)
                values.append(ex.multiplier(prec))
            elif tag == EXACT:
                values.append(to_big(ex, prec))
            else:
                values.append(to_big(v, prec))
            exact.append(ex)
        return EigenData(tuple(values), self.tags, tuple(exact), prec)

    # -- divisors ------------------------------------------------------
    def multiplicative_divisor(self, index, j):
        with working_precision(self.prec):
            prod = mpc(1)
            for v, e in zip(self.values, index):
                if e:
                    prod = prod * v**e
            return prod - self.values[j]

    def additive_divisor(self, index, j):
        with working_precision(self.prec):
            total = mpc(0)
            for v, e in zip(self.values, index):
                if e:
                    total = total + v * e
            return total - self.values[j]

    def _support_tags(self, index, j):
        return {self.tags[k] for k, e in enumerate(index) if e} | {self.tags[j]}

    def exact_multiplicative_zero(self, index, j):
        """Exact verdict on ``lambda^I == lambda_j``; ``None`` when undecidable exactly."""
        tags = self._support_tags(index, j)
        if tags == {EXACT}:
            prod = Fraction(1)
            for f, e in zip(self.exact, index):
                if e:
                    prod *= f**e
            return prod == self.exact[j]
        if tags == {ANGLE}:
            rational = Fraction(0)
            symbols = {}
            for k, e in enumerate(list(index) + [None]):
                if k == len(index):
                    rot, mult = self.exact[j], -1
                else:
                    if not e:
                        continue
                    rot, mult = self.exact[k], e
                if rot.exact is not None:
                    rational += mult * rot.exact
                else:
                    symbols[rot.symbol] = symbols.get(rot.symbol, 0) + mult
            live = [s for s, c in symbols.items() if c]
            if not live:
                return rational.denominator == 1
            if len(live) == 1:
                # an irrational times a nonzero integer plus a rational is not an integer
                return False
            return None
        return None

    def exact_additive_zero(self, index, j):
        """Exact verdict on ``<I, lambda> == lambda_j`` for rational eigenvalues."""
        if self._support_tags(index, j) == {EXACT}:
            total = sum((f * e for f, e in zip(self.exact, index) if e), Fraction(0))
            return total == self.exact[j]
        return None


@dataclass(frozen=True)
class ResonanceSet:
    entries: tuple
    numeric_only: tuple

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, item):
        index, j = item
        return (tuple(index), j) in self.entries


@dataclass(frozen=True)
class DivisorEntry:
    order: int
    magnitude: mpfr
    index: tuple
    component: int


@dataclass(frozen=True)
class DivisorLog:
    """Smallest divisor met at each order, and where it occurred."""

    entries: tuple

    def by_order(self):
        return {e.order: e for e in self.entries}

    def min_magnitude(self):
        if not self.entries:
            return None
        return min(e.magnitude for e in self.entries)

    def min_log10(self):
        m = self.min_magnitude()
        if m is None:
            return None
        if m == 0:
            return float("-inf")
        return float(gmpy2.log10(m))


def _resonant(eig, index, j, divisor, tol, additive=False):
    verdict = eig.exact_additive_zero(index, j) if additive else eig.exact_multiplicative_zero(index, j)
    if verdict is None:
        return abs(divisor) < tol, True
    return verdict, False


def detect_resonances(eig: EigenData, max_order: int) -> ResonanceSet:
    """All ``(I, j)`` with ``2 <= |I| <= max_order`` and ``lambda^I = lambda_j``.

    Components ``j`` are 0-based.  Entries decided only numerically (below
    ``2^-(prec/2)``) are flagged in ``numeric_only``.
    """
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    n = eig.dimension
    tol = tolerance(eig.prec)
    entries, flags = [], []
    for degree in range(2, max_order + 1):
        for index in monomials(n, degree):
            for j in range(n):
                verdict = eig.exact_multiplicative_zero(index, j)
                numeric = verdict is None
                if numeric:
                    verdict = abs(eig.multiplicative_divisor(index, j)) < tol
                if verdict:
                    entries.append((index, j))
                    flags.append(numeric)
    return ResonanceSet(tuple(entries), tuple(flags))


def classify_domain(eig: EigenData) -> Domain:
    """Poincare iff ``min(max |lambda_i|, max |1/lambda_i|) < 1``."""
    with working_precision(eig.prec):
        mods = [abs(v) for v in eig.values]
        big = max(mods)
        inv = max(1 / m for m in mods)
    return Domain.POINCARE if min(big, inv) < 1 else Domain.SIEGEL


def _as_eigen(lam, n, prec):
    if isinstance(lam, EigenData):
        if lam.dimension != n:
            raise DimensionMismatch(f"need {n} eigenvalues, got {lam.dimension}")
        return lam.with_prec(prec) if lam.prec != prec else lam
    if isinstance(lam, RotationNumber):
        return EigenData.from_angles([lam], prec)
    if n == 1 and not isinstance(lam, (list, tuple)):
        lam = [lam]
    if len(lam) != n:
        raise DimensionMismatch(f"need {n} eigenvalues, got {len(lam)}")
    return EigenData.numeric(lam, prec)


def _constant_value(x, ring):
    if ring.kind == "param":
        if x.degree > 0:
            raise ValueError("the linear part must not depend on the parameters")
        return x.coefficient((0,) * ring.num_params)
    return x


GUARD_AUTO = "auto"
_GUARD_STEP = 32
_GUARD_ROUNDS = 6


def _round_to(x, ring, prec):
    if ring.kind == "param":
        return ParamPoly(x.num_params, {e: c + 0 for e, c in x.terms.items()}, _trusted=True)
    return x + 0


def _agreement_bits(pairs, ring, prec):
    """Worst relative agreement, in bits, over ``(approx, reference)`` pairs.

    Differences are measured against ``max(|reference|, 2^-prec * scale)``
    so that coefficients which vanish in exact arithmetic (and so carry only
    rounding noise) do not demand unbounded precision.
    """
    pairs = list(pairs)
    scale = max((ring.magnitude(y) for _, y in pairs), default=mpfr(0))
    floor = gmpy2.mul_2exp(scale, -prec)
    worst = math.inf
    for x, y in pairs:
        d = ring.magnitude(x - y)
        if gmpy2.is_zero(d):
            continue
        ref = max(ring.magnitude(y), floor)
        if gmpy2.is_zero(ref):
            return -math.inf
        worst = min(worst, float(-gmpy2.log2(d / ref)))
    return worst


def _guarded(solve, compare, prec, N, guard_bits):
    """Run ``solve(W)`` at raised working precision ``W`` and check it.

    The order-by-order recurrences cancel heavily (the terms summed at order
    ``n`` can exceed the result by hundreds of bits), so the working
    precision is raised until two runs ``_GUARD_STEP`` bits apart agree to
    ``prec + 8`` bits.  A fixed integer ``guard_bits`` skips the check.
    """
    if guard_bits != GUARD_AUTO:
        return solve(prec + int(guard_bits))
    W = prec + _GUARD_STEP + N // 4
    best = None
    for _ in range(_GUARD_ROUNDS):
        low = solve(W)
        high = solve(W + _GUARD_STEP)
        with working_precision(W + _GUARD_STEP):
            bits = compare(low, high)
        if bits >= prec + 8:
            return high
        best = max(best or -math.inf, bits)
        lost = W - bits if bits > -math.inf else W
        W = max(W + _GUARD_STEP, int(prec + lost) + 2 * _GUARD_STEP)
    raise PrecisionDisagreement(
        f"could not reach {prec} correct bits (best {best:.0f}) with {W} working bits"
    )


def _solve_1d(fc, eig, N, convention, tol, ring):
    """The recurrence at the working precision of ``ring`` and ``eig``."""
    zero = ring.zero()
    is_zero = ring.is_zero
    lam_v = eig.values[0]
    fc = [zero, ring.coerce(lam_v)] + list(fc[2 : N + 1])
    h = [zero] * (N + 1)
    h[1] = ring.one()
    # acc[m] = sum_{j < n} h_j [f^j]_m for the current order n
    acc = [zero] * (N + 1)
    for m in range(2, N + 1):
        acc[m] = fc[m]
    power = fc
    lam_pow = lam_v
    scale = mpfr(1)
    entries = []
    for n in range(2, N + 1):
        lam_pow = lam_pow * lam_v
        div = lam_pow - lam_v
        entries.append(DivisorEntry(n, abs(div), (n,), 0))
        resonant, _ = _resonant(eig, (n,), 0, div, tol)
        num = -acc[n]
        if resonant:
            if convention == RESONANT_ERROR:
                raise ResonantDivisor((n,), 0, abs(div))
            if ring.magnitude(num) > tol * scale:
                raise ObstructionNonzero((n,), 0, ring.magnitude(num))
            hn = zero
        else:
            hn = num / div
            if is_zero(hn):
                hn = zero
            else:
                mag = ring.magnitude(hn)
                if mag > scale:
                    scale = mag
        h[n] = hn
        if n < N:
            power = _mul_trunc(power, fc, N, ring)
            if not is_zero(hn):
                for m in range(n + 1, N + 1):
                    pm = power[m]
                    if not is_zero(pm):
                        acc[m] = acc[m] + hn * pm
    return h, entries


def linearize_germ_1d(
    f: TruncSeries, lam, N: int, resonant_convention=RESONANT_ERROR, guard_bits=GUARD_AUTO
):
    """Solve ``h(f(z)) = lambda h(z)`` to order ``N`` with ``h = z + O(z^2)``.

    Parameters
    ----------
    f : TruncSeries
        The germ, over scalars or parameter polynomials, with ``f_1 = lambda``.
    lam : number, RotationNumber or EigenData
        The multiplier.  Exact tags make resonance decisions exact.
    N : int
        Truncation order.
    resonant_convention : {"error", "zero-if-obstruction-vanishes"}
        ``"error"`` raises :class:`ResonantDivisor` at a vanishing divisor;
        the other convention sets that coefficient to zero and requires the
        numerator to vanish (else :class:`ObstructionNonzero`).
    guard_bits : "auto" or int
        Extra internal working precision.  ``"auto"`` verifies the result
        against a second run and raises the guard until they agree.

    Returns
    -------
    (TruncSeries, DivisorLog)
        ``h`` over the ring of ``f`` (rounded to its precision) and the
        divisor magnitudes ``|lambda^n - lambda|`` per order.
    """
    if resonant_convention not in _CONVENTIONS:
        raise ValueError(f"unknown resonant convention {resonant_convention!r}")
    if f.order < N:
        raise TruncationTooShort(f"germ known to order {f.order}, asked for {N}")
    ring = f.ring
    prec = ring.prec
    eig = _as_eigen(lam, 1, prec)
    tol = tolerance(prec)
    with working_precision(prec):
        lam_v = eig.values[0]
        if not ring.is_zero(f.coeffs[0]):
            raise ValueError("germ must fix the origin")
        f1 = _constant_value(f.coeffs[1], ring)
        if abs(f1 - lam_v) > tol * max(1, abs(lam_v)):
            raise ValueError("linear coefficient of f does not match lambda")

    def solve(W):
        with working_precision(W):
            return _solve_1d(f.coeffs, eig.with_prec(W), N, resonant_convention, tol, ring.with_prec(W))

    def compare(a, b):
        return _agreement_bits(zip(a[0], b[0]), ring, prec)

    h, entries = _guarded(solve, compare, prec, N, guard_bits)
    with working_precision(prec):
        h = tuple(_round_to(c, ring, prec) for c in h)
        entries = tuple(DivisorEntry(e.order, e.magnitude + 0, e.index, e.component) for e in entries)
    return TruncSeries(h, ring), DivisorLog(entries)


def _check_diagonal(F, eig, tol):
    ring = F.ring
    n = F.nvars
    for j, comp in enumerate(F.components):
        for idx, c in comp.items():
            if sum(idx) != 1:
                continue
            expected = eig.values[j] if idx == unit_index(n, j) else 0
            if abs(_constant_value(c, ring) - expected) > tol * max(1, abs(eig.values[j])):
                raise ValueError("linear part of F is not diag(lambda)")
        if unit_index(n, j) not in comp:
            raise ValueError("linear part of F is not diag(lambda)")


def _solve_nd(F, eig, N, convention, tol, ring):
    n = F.nvars
    zero = ring.zero()
    is_zero = ring.is_zero
    # replace the linear part by the working-precision eigenvalues
    comps = []
    for j, comp in enumerate(F.components):
        c = {unit_index(n, j): ring.coerce(eig.values[j])}
        c.update({k: v for k, v in comp.items() if sum(k) >= 2})
        comps.append(_clean(c, ring))
    Ft = MultiSeries(n, N, tuple(comps), ring)
    powers = MonomialPowers(Ft, N)
    H = [{unit_index(n, j): ring.one()} for j in range(n)]
    acc = [{k: v for k, v in comp.items() if sum(k) >= 2} for comp in Ft.components]
    lam_pows = [[mpc(1)] for _ in range(n)]
    for k in range(n):
        for _ in range(N):
            lam_pows[k].append(lam_pows[k][-1] * eig.values[k])
    scale = mpfr(1)
    entries = []
    for degree in range(2, N + 1):
        best = None
        for j in range(n):
            for idx in monomials(n, degree):
                lam_I = mpc(1)
                for k, e in enumerate(idx):
                    if e:
                        lam_I = lam_I * lam_pows[k][e]
                div = lam_I - eig.values[j]
                mag = abs(div)
                if best is None or mag < best[0]:
                    best = (mag, idx, j)
                resonant, _ = _resonant(eig, idx, j, div, tol)
                num = acc[j].get(idx, zero)
                if resonant:
                    if convention == RESONANT_ERROR:
                        raise ResonantDivisor(idx, j, mag)
                    if not is_zero(num) and ring.magnitude(num) > tol * scale:
                        raise ObstructionNonzero(idx, j, ring.magnitude(num))
                    continue
                if is_zero(num):
                    continue
                hval = -num / div
                H[j][idx] = hval
                m = ring.magnitude(hval)
                if m > scale:
                    scale = m
        entries.append(DivisorEntry(degree, best[0], best[1], best[2]))
        if degree == N:
            break
        for idx in monomials(n, degree):
            coeffs = [(j, H[j][idx]) for j in range(n) if idx in H[j]]
            if not coeffs:
                continue
            for key, v in powers(idx).items():
                if sum(key) <= degree:
                    continue
                for j, c in coeffs:
                    a = acc[j]
                    a[key] = a[key] + c * v if key in a else c * v
    return [_clean(h, ring) for h in H], entries


def linearize_germ_nd(
    F: MultiSeries, eig, N: int, resonant_convention=RESONANT_ERROR, guard_bits=GUARD_AUTO
):
    """Solve ``H(F(z)) = Lambda H(z)`` to total degree ``N`` with ``DH(0) = I``.

    Degrees are solved in increasing order; within a degree, components are
    visited in order and multi-indices in graded-lex order.  Components are
    0-based.  Returns ``(H, DivisorLog)``; ``guard_bits`` as in
    :func:`linearize_germ_1d`.
    """
    if resonant_convention not in _CONVENTIONS:
        raise ValueError(f"unknown resonant convention {resonant_convention!r}")
    n = F.nvars
    if F.ncomp != n:
        raise DimensionMismatch("germ must map C^n to C^n")
    if F.order < N:
        raise TruncationTooShort(f"germ known to order {F.order}, asked for {N}")
    ring = F.ring
    prec = ring.prec
    eig = _as_eigen(eig, n, prec)
    tol = tolerance(prec)
    Ft = F.truncate(N)
    with working_precision(prec):
        _check_diagonal(Ft, eig, tol)
        for comp in Ft.components:
            if (0,) * n in comp:
                raise ValueError("germ must fix the origin")

    def solve(W):
        with working_precision(W):
            return _solve_nd(Ft, eig.with_prec(W), N, resonant_convention, tol, ring.with_prec(W))

    def compare(a, b):
        zero = ring.zero()
        pairs = []
        for ha, hb in zip(a[0], b[0]):
            for key in set(ha) | set(hb):
                pairs.append((ha.get(key, zero), hb.get(key, zero)))
        return _agreement_bits(pairs, ring, prec)

    H, entries = _guarded(solve, compare, prec, N, guard_bits)
    with working_precision(prec):
        comps = tuple(_clean({k: _round_to(v, ring, prec) for k, v in h.items()}, ring) for h in H)
        entries = tuple(DivisorEntry(e.order, e.magnitude + 0, e.index, e.component) for e in entries)
    return MultiSeries(n, N, comps, ring), DivisorLog(entries)


def conjugacy_residual(h, f, lam, N: int):
    """Max coefficient magnitude of ``h o f - Lambda h`` through order ``N``."""
    if isinstance(h, MultiSeries) != isinstance(f, MultiSeries):
        raise DimensionMismatch("h and f must both be one- or multi-variable")
    if h.order < N or f.order < N:
        raise DimensionMismatch(f"truncations {h.order}, {f.order} are shorter than {N}")
    ring = h.ring
    if isinstance(h, MultiSeries):
        if h.nvars != f.ncomp or h.ncomp != f.ncomp:
            raise DimensionMismatch("h and f have different dimensions")
        eig = _as_eigen(lam, h.ncomp, ring.prec)
        with working_precision(ring.prec):
            left = multi_compose(h.truncate(N), f.truncate(N), N)
            worst = mpfr(0)
            for j in range(h.ncomp):
                keys = set(left.components[j]) | set(h.components[j])
                for key in keys:
                    if sum(key) > N:
                        continue
                    r = left.coefficient(j, key) - h.coefficient(j, key) * eig.values[j]
                    m = ring.magnitude(r)
                    if m > worst:
                        worst = m
        return worst
    eig = _as_eigen(lam, 1, ring.prec)
    with working_precision(ring.prec):
        left = compose(h.truncate(N), f.truncate(N), N)
        lam_v = eig.values[0]
        worst = mpfr(0)
        for n in range(N + 1):
            m = ring.magnitude(left.coeffs[n] - h.coeffs[n] * lam_v)
            if m > worst:
                worst = m
    return worst
