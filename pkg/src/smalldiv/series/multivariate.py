"""Sparse truncated power series in ``n`` variables with ``p`` components.

Each component is a dict from exponent tuples to ring elements, holding only
nonzero coefficients and kept in graded-lexicographic order (total degree,
then exponent tuple descending, so ``z1`` dominates ``z2``).  Truncation is by
total degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from ..errors import DimensionMismatch, InnerHasConstantTerm, RingMismatch, TruncationTooShort
from .parampoly import ParamPoly, ParamRing, ScalarRing, common_ring
from .scalars import DEFAULT_PREC, working_precision


def graded_key(index):
    return (sum(index), tuple(-e for e in index))


def monomials(nvars, degree):
    """Exponent tuples of total ``degree`` in graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    out.sort(key=graded_key)
    return out


def unit_index(nvars, k):
    e = [0] * nvars
    e[k] = 1
    return tuple(e)


def _clean(d, ring):
    return {k: d[k] for k in sorted(d, key=graded_key) if not ring.is_zero(d[k])}


def _madd(a, b, ring, sign=1):
    out = dict(a)
    for k, v in b.items():
        v = v if sign > 0 else -v
        out[k] = out[k] + v if k in out else v
    return _clean(out, ring)


def _mmul(a, b, order, ring):
    """Product of two sparse scalar series truncated at total degree ``order``."""
    out = {}
    bl = [(k, sum(k), v) for k, v in b.items()]
    for ka, va in a.items():
        da = sum(ka)
        if da > order:
            break
        for kb, db, vb in bl:
            if da + db > order:
                break
            k = tuple(x + y for x, y in zip(ka, kb))
            if k in out:
                out[k] = out[k] + va * vb
            else:
                out[k] = va * vb
    return _clean(out, ring)


@dataclass(frozen=True, eq=False)
class MultiSeries:
    """A map ``C^n -> C^p`` as ``p`` sparse truncated series in ``n`` variables."""

    nvars: int
    order: int
    components: tuple
    ring: ScalarRing | ParamRing = ScalarRing()

    @classmethod
    def from_components(cls, components, nvars=None, order=None, ring=None, prec=DEFAULT_PREC):
        """Build from a list of ``{exponent tuple: coeff}`` dicts, one per component."""
        ring = ring or ScalarRing(prec)
        comps = []
        top = 0
        for comp in components:
            d = {}
            with working_precision(ring.prec):
                for idx, c in comp.items():
                    idx = tuple(int(e) for e in idx)
                    if nvars is None:
                        nvars = len(idx)
                    if len(idx) != nvars or min(idx) < 0:
                        raise DimensionMismatch(f"exponent {idx} does not match {nvars} variables")
                    top = max(top, sum(idx))
                    d[idx] = ring.coerce(c)
            comps.append(d)
        if nvars is None:
            nvars = len(comps)
        order = top if order is None else order
        comps = [{k: v for k, v in d.items() if sum(k) <= order} for d in comps]
        return cls(nvars, order, tuple(_clean(d, ring) for d in comps), ring)

    @classmethod
    def identity(cls, n, order, ring=None):
        ring = ring or ScalarRing()
        return cls(n, order, tuple({unit_index(n, j): ring.one()} for j in range(n)), ring)

    @classmethod
    def linear(cls, diagonal, order, ring=None):
        ring = ring or ScalarRing()
        n = len(diagonal)
        with working_precision(ring.prec):
            comps = tuple(
                _clean({unit_index(n, j): ring.coerce(diagonal[j])}, ring) for j in range(n)
            )
        return cls(n, order, comps, ring)

    @property
    def ncomp(self):
        return len(self.components)

    @property
    def dimension(self):
        return self.nvars

    def coefficient(self, j, index):
        return self.components[j].get(tuple(index), self.ring.zero())

    @property
    def valuation(self):
        degs = [sum(k) for comp in self.components for k in comp]
        return min(degs) if degs else None

    def degree_part(self, degree):
        return MultiSeries(
            self.nvars,
            self.order,
            tuple({k: v for k, v in comp.items() if sum(k) == degree} for comp in self.components),
            self.ring,
        )

    def without_linear(self):
        return MultiSeries(
            self.nvars,
            self.order,
            tuple({k: v for k, v in comp.items() if sum(k) >= 2} for comp in self.components),
            self.ring,
        )

    def truncate(self, order):
        if order > self.order:
            raise TruncationTooShort(f"series known to order {self.order}, asked for {order}")
        comps = tuple({k: v for k, v in comp.items() if sum(k) <= order} for comp in self.components)
        return MultiSeries(self.nvars, order, comps, self.ring)

    def padded(self, order):
        """Raise the truncation order, treating the series as a polynomial."""
        if order <= self.order:
            return self.truncate(order)
        return MultiSeries(self.nvars, order, self.components, self.ring)

    def magnitudes_by_degree(self):
        """``[max |coeff| over degree l]`` for ``l = 0..order``."""
        out = [0] * (self.order + 1)
        for comp in self.components:
            for k, v in comp.items():
                m = self.ring.magnitude(v)
                d = sum(k)
                if m > out[d]:
                    out[d] = m
        return out

    def max_abs(self):
        return max(self.magnitudes_by_degree(), default=0)

    def evaluate_params(self, t):
        if self.ring.kind != "param":
            return self
        ring = ScalarRing(self.ring.prec)
        with working_precision(self.ring.prec):
            comps = tuple(_clean({k: v.evaluate(t) for k, v in c.items()}, ring) for c in self.components)
        return MultiSeries(self.nvars, self.order, comps, ring)

    def equals(self, other) -> bool:
        return (
            self.nvars == other.nvars
            and self.ring.kind == other.ring.kind
            and self.components == other.components
        )

    def items(self):
        for j, comp in enumerate(self.components):
            for k, v in comp.items():
                yield j, k, v

    def __add__(self, other):
        return multi_arith("add", self, other)

    def __sub__(self, other):
        return multi_arith("sub", self, other)

    def __repr__(self):
        return f"MultiSeries(nvars={self.nvars}, order={self.order}, components={self.components})"


def multi_arith(op, a, b, order=None):
    """Componentwise ``add``/``sub``/``multiply``; ``scale`` by a ring element."""
    if op == "scale":
        N = a.order if order is None else order
        if a.order < N:
            raise TruncationTooShort(f"operand known to order {a.order}, asked for {N}")
        if isinstance(b, ParamPoly) and a.ring.kind != "param":
            raise RingMismatch("cannot scale a scalar series by a parameter polynomial")
        with working_precision(a.ring.prec):
            c = a.ring.coerce(b)
            comps = tuple(
                _clean({k: v * c for k, v in comp.items() if sum(k) <= N}, a.ring)
                for comp in a.components
            )
        return MultiSeries(a.nvars, N, comps, a.ring)
    if not isinstance(b, MultiSeries):
        raise RingMismatch(f"{op} needs two multivariate series")
    ring = common_ring(a.ring, b.ring)
    if a.nvars != b.nvars or a.ncomp != b.ncomp:
        raise DimensionMismatch("multivariate operands have different shapes")
    N = min(a.order, b.order) if order is None else order
    if a.order < N or b.order < N:
        raise TruncationTooShort(f"operands known to orders {a.order}, {b.order}; asked for {N}")
    a, b = a.truncate(N), b.truncate(N)
    with working_precision(ring.prec):
        if op == "add":
            comps = tuple(_madd(x, y, ring) for x, y in zip(a.components, b.components))
        elif op == "sub":
            comps = tuple(_madd(x, y, ring, sign=-1) for x, y in zip(a.components, b.components))
        elif op == "multiply":
            comps = tuple(_mmul(x, y, N, ring) for x, y in zip(a.components, b.components))
        else:
            raise ValueError(f"unknown series operation {op!r}")
    return MultiSeries(a.nvars, N, comps, ring)


class MonomialPowers:
    """Memoized products ``F^J = prod_k F_k^{J_k}`` truncated at ``order``."""

    def __init__(self, inner, order):
        self.inner = inner
        self.order = order
        self.ring = inner.ring
        n = inner.ncomp
        self._cache = {(0,) * n: {(0,) * inner.nvars: self.ring.one()}}

    def __call__(self, index):
        index = tuple(index)
        cache = self._cache
        if index in cache:
            return cache[index]
        # peel off the last variable with a positive exponent
        k = max(i for i, e in enumerate(index) if e)
        prev = list(index)
        prev[k] -= 1
        base = self(tuple(prev))
        out = _mmul(base, self.inner.components[k], self.order, self.ring)
        cache[index] = out
        return out


def multi_compose(outer, inner, order=None):
    """``outer(inner(z))``: ``outer`` has ``inner.ncomp`` variables."""
    if not isinstance(outer, MultiSeries) or not isinstance(inner, MultiSeries):
        raise RingMismatch("multivariate composition needs two multivariate series")
    if outer.nvars != inner.ncomp:
        raise DimensionMismatch(
            f"outer series has {outer.nvars} variables but inner has {inner.ncomp} components"
        )
    ring = common_ring(outer.ring, inner.ring)
    N = min(outer.order, inner.order) if order is None else order
    if outer.order < N or inner.order < N:
        raise TruncationTooShort(
            f"operands known to orders {outer.order}, {inner.order}; asked for {N}"
        )
    zero_idx = (0,) * inner.nvars
    for comp in inner.components:
        if zero_idx in comp:
            raise InnerHasConstantTerm("inner series must vanish at the origin")
    with working_precision(ring.prec):
        powers = MonomialPowers(inner.truncate(N), N)
        comps = []
        for comp in outer.components:
            acc = {}
            for idx, c in comp.items():
                if sum(idx) > N:
                    break
                for k, v in powers(idx).items():
                    acc[k] = acc[k] + c * v if k in acc else c * v
            comps.append(_clean(acc, ring))
    return MultiSeries(inner.nvars, N, tuple(comps), ring)


def jacobian_apply(h, x, order):
    """``Dh(z) . X(z)`` truncated at ``order`` (both maps ``C^n -> C^n``)."""
    ring = common_ring(h.ring, x.ring)
    n = h.nvars
    comps = []
    with working_precision(ring.prec):
        for comp in h.components:
            acc = {}
            for k in range(n):
                deriv = {}
                for idx, c in comp.items():
                    if idx[k]:
                        e = list(idx)
                        e[k] -= 1
                        deriv[tuple(e)] = c * idx[k]
                term = _mmul(_clean(deriv, ring), x.components[k], order, ring)
                for key, v in term.items():
                    acc[key] = acc[key] + v if key in acc else v
            comps.append(_clean(acc, ring))
    return MultiSeries(n, order, tuple(comps), ring)


def as_multiseries(series):
    """View a one-variable series as a map ``C -> C`` in multivariate form."""
    if isinstance(series, MultiSeries):
        return series
    comp = {(n,): c for n, c in enumerate(series.coeffs) if not series.ring.is_zero(c)}
    return MultiSeries(1, series.order, (comp,), series.ring)
