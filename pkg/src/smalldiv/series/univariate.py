"""Truncated power series in one variable over a coefficient ring."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InnerHasConstantTerm, InversionFailure, RingMismatch, TruncationTooShort
from .parampoly import ParamPoly, ParamRing, ScalarRing, common_ring
from .scalars import DEFAULT_PREC, working_precision


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """``c_0 + c_1 z + ... + c_N z^N``; germs have ``c_0 = 0``.

    ``coeffs`` holds ``c_0..c_N`` positionally, so ``order`` is
    ``len(coeffs) - 1``.
    """

    coeffs: tuple
    ring: ScalarRing | ParamRing = ScalarRing()

    @classmethod
    def from_coeffs(cls, coeffs, order=None, ring=None, prec=DEFAULT_PREC):
        """Build from a sequence (index = exponent) or a ``{exponent: coeff}`` map."""
        ring = ring or ScalarRing(prec)
        if isinstance(coeffs, dict):
            top = max(coeffs, default=0)
            order = top if order is None else order
            dense = [ring.zero()] * (order + 1)
            with working_precision(ring.prec):
                for n, c in coeffs.items():
                    if n < 0:
                        raise ValueError("negative exponent")
                    if n <= order:
                        dense[n] = ring.coerce(c)
        else:
            seq = list(coeffs)
            order = len(seq) - 1 if order is None else order
            with working_precision(ring.prec):
                dense = [ring.coerce(c) for c in seq[: order + 1]]
            dense += [ring.zero()] * (order + 1 - len(dense))
        return cls(tuple(dense), ring)

    @classmethod
    def identity(cls, order, ring=None):
        ring = ring or ScalarRing()
        return cls.from_coeffs({1: ring.one()}, order=order, ring=ring)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def valuation(self):
        """Index of the first nonzero coefficient; ``None`` for the zero series."""
        for n, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return n
        return None

    def __getitem__(self, n):
        if 0 <= n < len(self.coeffs):
            return self.coeffs[n]
        return self.ring.zero()

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, order):
        if order > self.order:
            raise TruncationTooShort(f"series known to order {self.order}, asked for {order}")
        return TruncSeries(self.coeffs[: order + 1], self.ring)

    def padded(self, order):
        """Extend with zero coefficients; only meaningful for polynomials."""
        if order <= self.order:
            return self.truncate(order)
        return TruncSeries(self.coeffs + (self.ring.zero(),) * (order - self.order), self.ring)

    def magnitudes(self):
        return [self.ring.magnitude(c) for c in self.coeffs]

    def max_abs(self):
        return max(self.magnitudes(), default=0)

    def evaluate_params(self, t):
        """Specialize parameter-polynomial coefficients at ``t``."""
        if self.ring.kind != "param":
            return self
        out = ScalarRing(self.ring.prec)
        with working_precision(self.ring.prec):
            return TruncSeries(tuple(c.evaluate(t) for c in self.coeffs), out)

    def equals(self, other) -> bool:
        return self.ring.kind == other.ring.kind and self.coeffs == other.coeffs

    def __add__(self, other):
        return series_arith("add", self, other)

    def __sub__(self, other):
        return series_arith("sub", self, other)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_arith("multiply", self, other)
        return series_arith("scale", self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return series_arith("scale", self, -1)

    def __repr__(self):
        shown = ", ".join(f"{n}: {c}" for n, c in enumerate(self.coeffs) if not self.ring.is_zero(c))
        return f"TruncSeries(order={self.order}, {{{shown}}})"


def _mul_trunc(a, b, order, ring):
    """Product of coefficient lists truncated at ``order``.

    Contributions to each output index are added in increasing index of
    ``a``, which fixes the rounding sequence.
    """
    zero = ring.zero()
    is_zero = ring.is_zero
    out = [zero] * (order + 1)
    nb = [(j, c) for j, c in enumerate(b[: order + 1]) if not is_zero(c)]
    if not nb:
        return out
    jmin = nb[0][0]
    for i, ai in enumerate(a[: order + 1 - jmin]):
        if is_zero(ai):
            continue
        lim = order - i
        for j, bj in nb:
            if j > lim:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


def _scalar_operand(ring, b):
    if isinstance(b, ParamPoly):
        if ring.kind != "param":
            raise RingMismatch("cannot scale a scalar series by a parameter polynomial")
        return ring.coerce(b)
    if ring.kind == "param":
        return ring.coerce(b)
    return ring.coerce(b)


def series_arith(op, a, b, order=None):
    """Coefficient-wise ring arithmetic on truncated series.

    ``op`` is one of ``"add"``, ``"sub"``, ``"scale"``, ``"multiply"``.  For
    ``scale`` the second operand is a ring element or a number.  Multivariate
    operands are dispatched to :func:`smalldiv.series.multivariate.multi_arith`.
    """
    from .multivariate import MultiSeries, multi_arith

    if isinstance(a, MultiSeries):
        return multi_arith(op, a, b, order)
    if op == "scale":
        N = a.order if order is None else order
        if a.order < N:
            raise TruncationTooShort(f"operand known to order {a.order}, asked for {N}")
        with working_precision(a.ring.prec):
            c = _scalar_operand(a.ring, b)
            zero = a.ring.zero()
            out = [zero if a.ring.is_zero(x) else x * c for x in a.coeffs[: N + 1]]
        return TruncSeries(tuple(out), a.ring)
    if not isinstance(b, TruncSeries):
        raise RingMismatch(f"{op} needs two series")
    ring = common_ring(a.ring, b.ring)
    N = min(a.order, b.order) if order is None else order
    if a.order < N or b.order < N:
        raise TruncationTooShort(f"operands known to orders {a.order}, {b.order}; asked for {N}")
    with working_precision(ring.prec):
        if op == "add":
            out = [x + y for x, y in zip(a.coeffs[: N + 1], b.coeffs[: N + 1])]
        elif op == "sub":
            out = [x - y for x, y in zip(a.coeffs[: N + 1], b.coeffs[: N + 1])]
        elif op == "multiply":
            out = _mul_trunc(a.coeffs, b.coeffs, N, ring)
        else:
            raise ValueError(f"unknown series operation {op!r}")
        zero = ring.zero()
        out = [zero if ring.is_zero(x) else x for x in out]
    return TruncSeries(tuple(out), ring)


def compose(outer, inner, order=None):
    """``outer(inner(z))`` truncated at ``order``.

    Accumulates ``sum_k outer_k * inner**k`` with the powers built in
    ascending order, each truncated at ``order``.
    """
    from .multivariate import MultiSeries, multi_compose

    if isinstance(outer, MultiSeries) or isinstance(inner, MultiSeries):
        return multi_compose(outer, inner, order)
    ring = common_ring(outer.ring, inner.ring)
    N = min(outer.order, inner.order) if order is None else order
    if outer.order < N or inner.order < N:
        raise TruncationTooShort(
            f"operands known to orders {outer.order}, {inner.order}; asked for {N}"
        )
    if not ring.is_zero(inner.coeffs[0]):
        raise InnerHasConstantTerm("inner series must vanish at the origin")
    with working_precision(ring.prec):
        inner_c = list(inner.coeffs[: N + 1])
        out = [ring.zero()] * (N + 1)
        out[0] = outer.coeffs[0]
        power = inner_c
        val = inner.valuation
        if val is not None:
            for k in range(1, N // val + 1):
                ok = outer.coeffs[k]
                if not ring.is_zero(ok):
                    for n in range(k * val, N + 1):
                        pn = power[n]
                        if not ring.is_zero(pn):
                            out[n] = out[n] + ok * pn
                if (k + 1) * val <= N:
                    power = _mul_trunc(power, inner_c, N, ring)
        zero = ring.zero()
        out = [zero if ring.is_zero(x) else x for x in out]
    return TruncSeries(tuple(out), ring)


def revert(h, order=None):
    """Compositional inverse ``k`` with ``k(h(z)) = z`` to ``order``.

    Solved order by order from ``sum_j k_j [h^j]_n = delta_{n,1}``; only
    powers of the known series ``h`` are needed.
    """
    N = h.order if order is None else order
    if h.order < N:
        raise TruncationTooShort(f"series known to order {h.order}, asked for {N}")
    ring = h.ring
    if not ring.is_zero(h.coeffs[0]):
        raise InnerHasConstantTerm("only germs fixing the origin can be inverted")
    h1 = h.coeffs[1] if N >= 1 else ring.zero()
    if ring.kind == "param":
        if ring.is_zero(h1) or h1.degree != 0:
            raise InversionFailure("linear coefficient must be a nonzero constant")
        h1 = h1.coefficient((0,) * ring.num_params)
    elif ring.is_zero(h1):
        raise InversionFailure("linear coefficient vanishes")
    with working_precision(ring.prec):
        hc = list(h.coeffs[: N + 1])
        k = [ring.zero()] * (N + 1)
        acc = [ring.zero()] * (N + 1)
        inv1 = 1 / h1
        k[1] = ring.coerce(inv1)
        power = hc
        for m in range(2, N + 1):
            acc[m] = acc[m] + k[1] * power[m]
        h1_pow = h1
        for n in range(2, N + 1):
            h1_pow = h1_pow * h1
            power = _mul_trunc(power, hc, N, ring)
            kn = (-acc[n]) * (1 / h1_pow)
            k[n] = ring.zero() if ring.is_zero(kn) else kn
            if not ring.is_zero(kn):
                for m in range(n + 1, N + 1):
                    pm = power[m]
                    if not ring.is_zero(pm):
                        acc[m] = acc[m] + kn * pm
    return TruncSeries(tuple(k), ring)
