"""Linearization and resonant normal forms of holomorphic vector fields.

For ``dz/dt = X(z) = Lambda z + P(z)`` we look for ``w = h(z) = z + phi(z)``
with ``Dh . X = Lambda h + g(h)``.  At degree ``|I|`` in component ``j`` this
reads ``(<I, lambda> - lambda_j) phi_{j,I} - g_{j,I} = K_{j,I}``, where ``K``
only involves already computed terms.  Non-resonant positions go into ``h``;
resonant ones stay in ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from .errors import DimensionMismatch, LatticeMismatch, ObstructionNonzero, ResonantDivisor
from .linearization import (
    GUARD_AUTO,
    DivisorEntry,
    DivisorLog,
    EigenData,
    _agreement_bits,
    _as_eigen,
    _constant_value,
    _guarded,
    _round_to,
)
from .series.multivariate import (
    MonomialPowers,
    MultiSeries,
    _clean,
    as_multiseries,
    jacobian_apply,
    monomials,
    multi_compose,
    unit_index,
)
from .series.scalars import tolerance, working_precision


@dataclass(frozen=True)
class VectorFieldGerm:
    """``dz_j/dt = lambda_j z_j + P_j(z)`` with ``P`` of valuation at least 2."""

    eig: EigenData
    nonlinear: MultiSeries

    def __post_init__(self):
        n = self.eig.dimension
        P = self.nonlinear
        if P.nvars != n or P.ncomp != n:
            raise DimensionMismatch("nonlinear part has the wrong dimension")
        val = P.valuation
        if val is not None and val < 2:
            raise ValueError("the nonlinear part must have valuation >= 2")

    @classmethod
    def from_field(cls, eig, field):
        """Split a full field ``Lambda z + P`` (MultiSeries or TruncSeries)."""
        X = as_multiseries(field)
        eig = _as_eigen(eig, X.nvars, X.ring.prec)
        tol = tolerance(X.ring.prec)
        n = X.nvars
        comps = []
        with working_precision(X.ring.prec):
            for j, comp in enumerate(X.components):
                for idx, c in comp.items():
                    if sum(idx) == 0:
                        raise ValueError("vector field must vanish at the origin")
                    if sum(idx) == 1:
                        expected = eig.values[j] if idx == unit_index(n, j) else 0
                        if abs(_constant_value(c, X.ring) - expected) > tol * max(1, abs(eig.values[j])):
                            raise ValueError("linear part of the field is not diag(lambda)")
                comps.append({k: v for k, v in comp.items() if sum(k) >= 2})
        return cls(eig, MultiSeries(n, X.order, tuple(comps), X.ring))

    @property
    def dimension(self):
        return self.eig.dimension

    @property
    def ring(self):
        return self.nonlinear.ring

    def field(self, N=None, eig=None):
        """The full field ``Lambda z + P`` truncated at ``N``."""
        eig = eig or self.eig
        N = self.nonlinear.order if N is None else N
        P = self.nonlinear.padded(N)
        ring = P.ring if eig.prec == P.ring.prec else P.ring.with_prec(eig.prec)
        n = self.dimension
        with working_precision(ring.prec):
            comps = []
            for j, comp in enumerate(P.components):
                c = {unit_index(n, j): ring.coerce(eig.values[j])}
                c.update(comp)
                comps.append(_clean(c, ring))
        return MultiSeries(n, N, tuple(comps), ring)


def _is_generated(v, generators):
    """Is ``v`` a non-negative integer combination of ``generators``?"""
    gens = tuple(tuple(g) for g in generators)

    @lru_cache(maxsize=None)
    def reach(u):
        if all(e == 0 for e in u):
            return True
        if min(u) < 0:
            return False
        for g in gens:
            w = tuple(a - b for a, b in zip(u, g))
            if min(w) >= 0 and reach(w):
                return True
        return False

    return reach(tuple(v))


@dataclass(frozen=True)
class ResonanceLattice:
    """Generators ``r_1, ..., r_l`` in ``N^n`` of the additive resonances.

    Each generator satisfies ``<r, lambda> = 0`` (exactly for rational
    eigenvalues, else within ``2^-(prec/2)``).
    """

    generators: tuple
    eig: EigenData

    def __post_init__(self):
        n = self.eig.dimension
        tol = tolerance(self.eig.prec)
        for r in self.generators:
            r = tuple(r)
            if len(r) != n or min(r) < 0 or sum(r) == 0:
                raise ValueError(f"generator {r} must be a nonzero index in N^{n}")
            exact = self._exact_zero(r)
            if exact is None:
                with working_precision(self.eig.prec):
                    total = sum((v * e for v, e in zip(self.eig.values, r) if e), gmpy2.mpc(0))
                ok = abs(total) < tol
            else:
                ok = exact
            if not ok:
                raise LatticeMismatch(r, None, f"generator {r} does not satisfy <r, lambda> = 0")

    def _exact_zero(self, r):
        if all(self.eig.tags[k] == "exact" for k, e in enumerate(r) if e):
            return sum(f * e for f, e in zip(self.eig.exact, r) if e) == 0
        return None

    def generates(self, index, j):
        """Whether the resonant position ``(I, j)`` comes from the lattice."""
        v = list(index)
        v[j] -= 1
        return _is_generated(v, self.generators)

    def linear_generators(self):
        return [tuple(r) for r in self.generators if sum(r) == 1]


def _jac_degree(phi, P_deg, n, D):
    """Degree-``D`` part of ``Dphi . P``; ``P_deg[(d, k)]`` lists component-``k`` terms of degree ``d``."""
    out = [dict() for _ in range(n)]
    for j, comp in enumerate(phi):
        for a, c in comp.items():
            da = sum(a)
            for k in range(n):
                if not a[k]:
                    continue
                terms = P_deg.get((D - da + 1, k))
                if not terms:
                    continue
                e = list(a)
                e[k] -= 1
                ck = c * a[k]
                for kb, vb in terms:
                    key = tuple(x + y for x, y in zip(e, kb))
                    term = ck * vb
                    out[j][key] = out[j][key] + term if key in out[j] else term
    return out


def _solve_vf(X, eig, N, tol, ring, lattice):
    n = X.dimension
    zero = ring.zero()
    is_zero = ring.is_zero
    P_comps = X.nonlinear.padded(N).components
    P_deg = {}
    for k, comp in enumerate(P_comps):
        for idx, v in comp.items():
            P_deg.setdefault((sum(idx), k), []).append((idx, v))
    phi = [dict() for _ in range(n)]
    g = [dict() for _ in range(n)]
    scale = mpfr(1)
    entries = []
    linear_gens = set(lattice.linear_generators()) if lattice else set()
    for D in range(2, N + 1):
        # K = -P_D - [Dphi . P]_D + [g(h) - g(z)]_D with phi, g known below D
        jac = _jac_degree(phi, P_deg, n, D)
        gh = [dict() for _ in range(n)]
        if any(g):
            h = MultiSeries(
                n, D,
                tuple(_clean({unit_index(n, j): ring.one(), **phi[j]}, ring) for j in range(n)),
                ring,
            )
            powers = MonomialPowers(h, D)
            for j in range(n):
                for idx, c in g[j].items():
                    for key, v in powers(idx).items():
                        if sum(key) == D:
                            gh[j][key] = gh[j][key] + c * v if key in gh[j] else c * v
        best = None
        for j in range(n):
            for idx in monomials(n, D):
                div = eig.additive_divisor(idx, j)
                mag = abs(div)
                if best is None or mag < best[0]:
                    best = (mag, idx, j)
                K = gh[j].get(idx, zero)
                p = P_comps[j].get(idx)
                if p is not None:
                    K = K - p
                q = jac[j].get(idx)
                if q is not None:
                    K = K - q
                verdict = eig.exact_additive_zero(idx, j)
                resonant = abs(div) < tol if verdict is None else verdict
                if resonant:
                    if lattice is None:
                        raise ResonantDivisor(idx, j, mag)
                    if not lattice.generates(idx, j):
                        if is_zero(K) or ring.magnitude(K) <= tol * scale:
                            continue
                        raise LatticeMismatch(idx, j)
                    if is_zero(K):
                        continue
                    v = list(idx)
                    v[j] -= 1
                    if tuple(v) in linear_gens and ring.magnitude(K) > tol * scale:
                        raise ObstructionNonzero(idx, j, ring.magnitude(K))
                    g[j][idx] = -K
                    continue
                if is_zero(K):
                    continue
                val = K / div
                phi[j][idx] = val
                m = ring.magnitude(val)
                if m > scale:
                    scale = m
        entries.append(DivisorEntry(D, best[0], best[1], best[2]))
    H = [_clean({unit_index(n, j): ring.one(), **phi[j]}, ring) for j in range(n)]
    G = [_clean(g[j], ring) for j in range(n)]
    return H, G, entries


def _run(X, N, lattice, guard_bits):
    if N < 2:
        raise ValueError("truncation order must be at least 2")
    ring = X.ring
    prec = ring.prec
    tol = tolerance(prec)

    def solve(W):
        eig_w = X.eig.with_prec(W)
        with working_precision(W):
            lat = None if lattice is None else ResonanceLattice(lattice.generators, eig_w)
            return _solve_vf(X, eig_w, N, tol, ring.with_prec(W), lat)

    def compare(a, b):
        zero = ring.zero()
        pairs = []
        for part in (0, 1):
            for ca, cb in zip(a[part], b[part]):
                for key in set(ca) | set(cb):
                    pairs.append((ca.get(key, zero), cb.get(key, zero)))
        return _agreement_bits(pairs, ring, prec)

    H, G, entries = _guarded(solve, compare, prec, N, guard_bits)
    n = X.dimension
    with working_precision(prec):
        H = tuple(_clean({k: _round_to(v, ring, prec) for k, v in c.items()}, ring) for c in H)
        G = tuple(_clean({k: _round_to(v, ring, prec) for k, v in c.items()}, ring) for c in G)
        entries = tuple(DivisorEntry(e.order, e.magnitude + 0, e.index, e.component) for e in entries)
    return MultiSeries(n, N, H, ring), MultiSeries(n, N, G, ring), DivisorLog(entries)


def vf_linearize(X: VectorFieldGerm, N: int, guard_bits=GUARD_AUTO):
    """Linearizing change of variables for a non-resonant field.

    Returns ``(h, DivisorLog)`` with ``Dh . X = Lambda h`` through degree
    ``N``.  The divisor at ``(I, j)`` is ``<I, lambda> - lambda_j``; a
    vanishing one raises :class:`ResonantDivisor` naming ``(I, j)``
    (components 0-based).
    """
    h, _, log = _run(X, N, None, guard_bits)
    return h, log


def vf_normal_form(X: VectorFieldGerm, lattice: ResonanceLattice, N: int, guard_bits=GUARD_AUTO):
    """Resonant normal form ``dw/dt = Lambda w + g(w)``.

    Coefficients whose divisor vanishes stay in ``g`` (and ``h`` is zero
    there); all others are eliminated by ``h``.  A vanishing divisor at a
    position not generated by ``lattice`` raises :class:`LatticeMismatch`
    unless its coefficient is zero.  For a generator of length one, the
    ``g`` coefficient at ``e_j + r`` must vanish (else
    :class:`ObstructionNonzero`).

    Returns ``(h, g)``.
    """
    if lattice.eig.dimension != X.dimension:
        raise DimensionMismatch("lattice and field have different dimensions")
    h, g, _ = _run(X, N, lattice, guard_bits)
    return h, g


def pushforward_residual(h: MultiSeries, X: VectorFieldGerm, g: MultiSeries | None, N: int):
    """Max coefficient of ``Dh . X - Lambda h - g(h)`` through degree ``N``.

    Computed with full series products and compositions, independently of
    the order-by-order solver.
    """
    ring = h.ring
    n = X.dimension
    if h.nvars != n or h.ncomp != n:
        raise DimensionMismatch("h and X have different dimensions")
    with working_precision(ring.prec):
        field = X.field(N)
        left = jacobian_apply(h.truncate(N), field, N)
        if g is not None and any(g.components):
            gh = multi_compose(g.padded(N), h.truncate(N), N)
        else:
            gh = None
        worst = mpfr(0)
        for j in range(n):
            keys = set(left.components[j]) | set(h.components[j])
            if gh is not None:
                keys |= set(gh.components[j])
            for key in keys:
                if sum(key) > N:
                    continue
                r = left.coefficient(j, key) - h.coefficient(j, key) * X.eig.values[j]
                if gh is not None:
                    r = r - gh.coefficient(j, key)
                m = ring.magnitude(r)
                if m > worst:
                    worst = m
    return worst
