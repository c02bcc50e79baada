"""Polynomial families ``f_t = A z + sum_i t^i f_i(z)`` and growth diagnostics.

Families are linearized symbolically (coefficients of ``h_t`` are polynomials
in ``t``) or point by point along parameter sweeps.  Coefficient growth is
summarized by a windowed Cauchy-Hadamard estimate; the verdicts are
diagnostics, not certificates.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc

from .errors import (
    DimensionMismatch,
    ParamTrackingTooLarge,
    SmallDivisorError,
    TooFewCoefficients,
)
from .linearization import (
    RESONANT_ERROR,
    EigenData,
    linearize_germ_1d,
    linearize_germ_nd,
)
from .series.multivariate import MultiSeries, _clean, unit_index
from .series.multivariate import as_multiseries as _as_multi
from .series.parampoly import ParamPoly, ParamRing, ScalarRing
from .series.scalars import DEFAULT_PREC, to_big, working_precision
from .series.univariate import TruncSeries

FIXED_DEGREE = "fixed-degree"
VALUATION_WEIGHTED = "valuation-weighted"

CONVERGENT = "convergent-like"
DIVERGENT = "divergent-like"
UNDECIDED = "undecided"

MAX_SYMBOLIC_PARAMS = 2


@dataclass(frozen=True)
class GermFamily:
    """``f_t(z) = diag(lambda) z + sum_i t^i f_i(z)``.

    ``terms`` maps parameter exponents ``i`` (tuples of length ``num_params``)
    to nonlinear terms ``f_i`` (TruncSeries when ``dimension == 1``, else
    MultiSeries), each of valuation at least 2.  Terms are polynomials and are
    padded with zeros to whatever truncation is requested.
    """

    eig: EigenData
    num_params: int
    terms: dict
    valuation_mode: str = FIXED_DEGREE
    epsilon0: float | None = None

    def __post_init__(self):
        if self.num_params < 1:
            raise ValueError("a family needs at least one parameter")
        if self.valuation_mode not in (FIXED_DEGREE, VALUATION_WEIGHTED):
            raise ValueError(f"unknown valuation mode {self.valuation_mode!r}")
        if self.valuation_mode == VALUATION_WEIGHTED and not (self.epsilon0 and self.epsilon0 > 0):
            raise ValueError("valuation-weighted families need epsilon0 > 0")
        n = self.eig.dimension
        for idx, term in self.terms.items():
            if len(idx) != self.num_params or min(idx) < 0:
                raise DimensionMismatch(f"parameter exponent {idx} does not match m={self.num_params}")
            mt = _as_multi(term)
            if mt.nvars != n or mt.ncomp != n:
                raise DimensionMismatch("family term has the wrong dimension")
            val = mt.valuation
            if val is not None and val < 2:
                raise ValueError(f"term t^{idx} has valuation {val} < 2")
            if self.valuation_mode == VALUATION_WEIGHTED and val is not None:
                if val < self.epsilon0 * sum(idx):
                    raise ValueError(f"term t^{idx} violates valuation >= epsilon0*|i|")

    @classmethod
    def univariate(cls, lam, terms, num_params=1, prec=DEFAULT_PREC, **kw):
        """One-dimensional family from ``{param exponent: {power: coeff}}``.

        An integer parameter exponent ``k`` is shorthand for ``(k,)``.
        """
        eig = lam if isinstance(lam, EigenData) else EigenData.numeric([lam], prec)
        out = {}
        for idx, coeffs in terms.items():
            idx = (idx,) if isinstance(idx, int) else tuple(idx)
            out[idx] = TruncSeries.from_coeffs(dict(coeffs), ring=ScalarRing(eig.prec))
        return cls(eig, num_params, out, **kw)

    @property
    def dimension(self):
        return self.eig.dimension

    @property
    def prec(self):
        return self.eig.prec

    @property
    def max_param_degree(self):
        return max((sum(i) for i in self.terms), default=0)

    @property
    def max_z_degree(self):
        return max((_as_multi(t).order for t in self.terms.values()), default=1)

    def with_prec(self, prec):
        ring = ScalarRing(prec)
        terms = {}
        for idx, term in self.terms.items():
            with working_precision(prec):
                if isinstance(term, MultiSeries):
                    comps = tuple({k: to_big(v, prec) for k, v in c.items()} for c in term.components)
                    terms[idx] = MultiSeries(term.nvars, term.order, comps, ring)
                else:
                    terms[idx] = TruncSeries(tuple(to_big(c, prec) for c in term.coeffs), ring)
        return GermFamily(self.eig.with_prec(prec), self.num_params, terms,
                          self.valuation_mode, self.epsilon0)

    # -- assembling germs ------------------------------------------------
    def _collect(self, N, coeff_of):
        """Sum ``coeff_of(i) * f_i`` componentwise up to total degree ``N``."""
        n = self.dimension
        comps = [dict() for _ in range(n)]
        for idx in sorted(self.terms):
            mt = _as_multi(self.terms[idx])
            w = coeff_of(idx)
            for j, comp in enumerate(mt.components):
                for k, v in comp.items():
                    if sum(k) <= N:
                        comps[j][k] = comps[j][k] + w * v if k in comps[j] else w * v
        return comps

    def symbolic_germ(self, N):
        """The germ over the ring of polynomials in ``t``."""
        ring = ParamRing(self.num_params, self.prec)
        with working_precision(self.prec):
            comps = self._collect(
                N, lambda idx: ParamPoly(self.num_params, {idx: mpc(1)}, _trusted=True)
            )
            return self._finish(comps, N, ring)

    def evaluate(self, t, N):
        """The scalar germ ``f_t`` truncated at ``N`` (direct numeric sum)."""
        t = self._point(t)
        with working_precision(self.prec):
            def weight(idx):
                w = mpc(1)
                for tk, e in zip(t, idx):
                    if e:
                        w = w * tk**e
                return w

            comps = self._collect(N, weight)
            return self._finish(comps, N, ScalarRing(self.prec))

    def _point(self, t):
        if not isinstance(t, (tuple, list)):
            t = (t,)
        if len(t) != self.num_params:
            raise DimensionMismatch(f"expected {self.num_params} parameter values, got {len(t)}")
        return tuple(to_big(v, self.prec) for v in t)

    def _finish(self, comps, N, ring):
        n = self.dimension
        for j in range(n):
            e = unit_index(n, j)
            lin = ring.coerce(self.eig.values[j])
            comps[j][e] = comps[j][e] + lin if e in comps[j] else lin
        comps = tuple(_clean(c, ring) for c in comps)
        if n == 1:
            dense = [ring.zero()] * (N + 1)
            for (k,), v in comps[0].items():
                dense[k] = v
            return TruncSeries(tuple(dense), ring)
        return MultiSeries(n, N, comps, ring)


def _linearize(germ, eig, N, convention):
    if isinstance(germ, MultiSeries):
        return linearize_germ_nd(germ, eig, N, convention)
    return linearize_germ_1d(germ, eig, N, convention)


def family_linearize(fam: GermFamily, N: int, resonant_convention=RESONANT_ERROR):
    """Linearize the whole family with coefficients tracked as polynomials in ``t``.

    Returns ``(h_t, DivisorLog)``.  Symbolic tracking is refused for three or
    more parameters (use :func:`parameter_sweep` instead).
    """
    if fam.num_params > MAX_SYMBOLIC_PARAMS:
        raise ParamTrackingTooLarge(
            f"symbolic tracking supports at most {MAX_SYMBOLIC_PARAMS} parameters, got {fam.num_params}"
        )
    return _linearize(fam.symbolic_germ(N), fam.eig, N, resonant_convention)


def family_evaluate(h_t, t):
    """Specialize every ParamPoly coefficient of ``h_t`` at ``t``."""
    if h_t.ring.kind != "param":
        raise DimensionMismatch("series does not carry parameter polynomials")
    m = h_t.ring.num_params
    if not isinstance(t, (tuple, list)):
        t = (t,)
    if len(t) != m:
        raise DimensionMismatch(f"expected {m} parameter values, got {len(t)}")
    t = tuple(to_big(v, h_t.ring.prec) for v in t)
    return h_t.evaluate_params(t)


# -- degree structure ---------------------------------------------------------
@dataclass(frozen=True)
class DegreeBoundFit:
    """Exact ``deg_t`` per order and the affine envelope ``deg <= C0 + C1 l``.

    The envelope is a fit to the computed orders (a max-envelope, not a
    proven bound).  ``degrees[l]`` is None when the order-``l`` part vanishes.
    """

    degrees: dict
    C0: Fraction
    C1: Fraction

    def bound(self, l):
        return self.C0 + self.C1 * l

    def satisfied(self):
        return all(d is None or d <= self.bound(l) for l, d in self.degrees.items())


def degree_profile(h_t) -> DegreeBoundFit:
    """Per-order parameter degrees of ``h_t`` and their minimal affine envelope.

    Orders with vanishing coefficients are skipped.  The envelope passes
    through the first nonzero order ``l0``: ``C1`` is the largest slope from
    that point, and ``C0`` the smallest intercept admitting every order.
    """
    if h_t.ring.kind != "param":
        raise DimensionMismatch("degree_profile needs a series over parameter polynomials")
    degrees = {}
    if isinstance(h_t, MultiSeries):
        for l in range(1, h_t.order + 1):
            degrees[l] = None
        for _, k, v in h_t.items():
            l = sum(k)
            d = v.degree
            if d != -math.inf and (degrees.get(l) is None or d > degrees[l]):
                degrees[l] = int(d)
    else:
        for l in range(1, h_t.order + 1):
            d = h_t.coeffs[l].degree
            degrees[l] = None if d == -math.inf else int(d)
    pts = [(l, d) for l, d in sorted(degrees.items()) if d is not None]
    if not pts:
        return DegreeBoundFit(degrees, Fraction(0), Fraction(0))
    l0, d0 = pts[0]
    slopes = [Fraction(d - d0, l - l0) for l, d in pts[1:]]
    C1 = max(slopes, default=Fraction(0))
    C0 = max(Fraction(d) - C1 * l for l, d in pts)
    return DegreeBoundFit(degrees, C0, C1)


# -- radius estimation -------------------------------------------------------
@dataclass(frozen=True)
class WindowPolicy:
    """Thresholds for :func:`radius_estimate` (all overridable from configs)."""

    agreement: float = 0.05
    magnitude: float = 1e3
    growth: float = 0.5
    residual: float = 0.2

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RadiusReport:
    roots: tuple
    radius_upper: float
    radius_lower: float
    agreement: float
    max_root: float
    growth_exponent: float
    fit_residual: float
    verdict: str
    policy: WindowPolicy = field(default_factory=WindowPolicy)

    @property
    def radius(self):
        return self.radius_upper


def coefficient_magnitudes(h):
    """``|h_1|, ..., |h_N|`` (max over components and monomials of each degree)."""
    if isinstance(h, MultiSeries):
        return list(h.magnitudes_by_degree()[1:])
    return [h.ring.magnitude(c) for c in h.coeffs[1:]]


def _log_abs(x):
    if isinstance(x, (int, float)):
        return math.log(abs(x)) if x else -math.inf
    x = abs(x)
    if gmpy2.is_zero(x):
        return -math.inf
    return float(gmpy2.log(x))


def _window_radius(roots, lo, hi):
    peak = max(roots[lo - 1 : hi], default=0.0)
    return (math.inf if peak == 0 else 1.0 / peak), peak


def _growth_fit(logs, lo, hi):
    ls, ys = [], []
    for l in range(lo, hi + 1):
        y = logs[l - 1]
        if y != -math.inf:
            ls.append(l)
            ys.append(y)
    if len(ls) < 4:
        return 0.0, math.inf
    l = np.asarray(ls, dtype=float)
    y = np.asarray(ys, dtype=float)
    scale = float(l.max())
    design = np.column_stack([np.ones_like(l), l / scale, l * np.log(l) / scale])
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ sol
    norm = float(np.linalg.norm(y))
    rel = float(np.linalg.norm(resid)) / norm if norm > 0 else 0.0
    return float(sol[2] / scale), rel


def radius_estimate(coeffs, window_policy: WindowPolicy | None = None) -> RadiusReport:
    """Windowed Cauchy-Hadamard estimate from ``|h_1|, ..., |h_N|``.

    Parameters
    ----------
    coeffs : sequence
        Coefficient magnitudes for orders ``1..N`` (numbers or mpfr), or a
        series, in which case :func:`coefficient_magnitudes` is applied.
    window_policy : WindowPolicy, optional
        Verdict thresholds.

    Returns
    -------
    RadiusReport
        ``radius_upper = 1 / max_{l in [N/2, N]} |h_l|^(1/l)`` and the same
        over ``[N/4, N/2]``.  The verdict is convergent-like when the two
        agree within ``agreement`` and the radius is positive; otherwise
        divergent-like when some root exceeds ``magnitude`` or the fitted
        ``l log l`` growth exponent exceeds ``growth`` with relative residual
        below ``residual``; otherwise undecided.
    """
    policy = window_policy or WindowPolicy()
    if isinstance(coeffs, (TruncSeries, MultiSeries)):
        coeffs = coefficient_magnitudes(coeffs)
    N = len(coeffs)
    if N < 16:
        raise TooFewCoefficients(f"need at least 16 coefficients, got {N}")
    logs = [_log_abs(c) for c in coeffs]
    roots = tuple(0.0 if y == -math.inf else math.exp(y / l) for l, y in enumerate(logs, start=1))
    up_lo, up_hi = math.ceil(N / 2), N
    lo_lo, lo_hi = math.ceil(N / 4), N // 2
    r_up, _ = _window_radius(roots, up_lo, up_hi)
    r_low, _ = _window_radius(roots, lo_lo, lo_hi)
    if math.isinf(r_up) and math.isinf(r_low):
        agreement = 0.0
    elif math.isinf(r_up) or math.isinf(r_low):
        agreement = math.inf
    else:
        agreement = abs(r_up - r_low) / max(r_up, r_low)
    max_root = max(roots)
    growth, resid = _growth_fit(logs, lo_lo, N)
    if agreement <= policy.agreement and r_up > 0:
        verdict = CONVERGENT
    elif max_root > policy.magnitude or (growth > policy.growth and resid < policy.residual):
        verdict = DIVERGENT
    else:
        verdict = UNDECIDED
    return RadiusReport(roots, r_up, r_low, agreement, max_root, growth, resid, verdict, policy)


# -- sweeps ------------------------------------------------------------------
def _complex_tuple(p, m):
    if not isinstance(p, (tuple, list)):
        p = (p,)
    if len(p) != m:
        raise DimensionMismatch(f"sample point {p} does not have {m} coordinates")
    return tuple(complex(v) for v in p)


def _describe_point(p):
    if not isinstance(p, (tuple, list)):
        p = (p,)
    return [str(complex(v)) for v in p]


@dataclass(frozen=True)
class PointSet:
    points: tuple

    kind = "points"

    def sample(self, samples, m, rng):
        pts = [_complex_tuple(p, m) for p in self.points]
        return pts if samples is None else pts[:samples]

    def describe(self):
        return {"kind": self.kind, "points": [_describe_point(p) for p in self.points]}


@dataclass(frozen=True)
class ComplexLine:
    """``t = base + s * direction`` for real ``s`` in ``[s_start, s_end]``.

    Samples are equispaced unless ``random`` is set, in which case ``s`` is
    drawn uniformly from the seeded generator and sorted.
    """

    base: tuple
    direction: tuple
    s_start: float = 0.0
    s_end: float = 1.0
    random: bool = False

    kind = "line"

    def sample(self, samples, m, rng):
        base = _complex_tuple(self.base, m)
        d = _complex_tuple(self.direction, m)
        if samples is None or samples < 2:
            raise ValueError("a line sweep needs at least 2 samples")
        if self.random:
            s = np.sort(rng.uniform(self.s_start, self.s_end, size=samples))
        else:
            s = np.linspace(self.s_start, self.s_end, samples)
        return [tuple(b + float(sv) * dk for b, dk in zip(base, d)) for sv in s]

    def describe(self):
        return {
            "kind": self.kind,
            "base": _describe_point(self.base),
            "direction": _describe_point(self.direction),
            "s_start": self.s_start,
            "s_end": self.s_end,
            "random": self.random,
        }


@dataclass(frozen=True)
class Grid:
    """Cartesian product of per-parameter value lists."""

    axes: tuple

    kind = "grid"

    def sample(self, samples, m, rng):
        if len(self.axes) != m:
            raise DimensionMismatch(f"grid has {len(self.axes)} axes, family has {m} parameters")
        pts = [()]
        for axis in self.axes:
            pts = [p + (complex(v),) for p in pts for v in axis]
        return pts if samples is None else pts[:samples]

    def describe(self):
        return {"kind": self.kind, "axes": [[str(complex(v)) for v in axis] for axis in self.axes]}


@dataclass(frozen=True)
class SweepRow:
    index: int
    t: tuple
    N: int
    report: RadiusReport | None
    min_divisor_log10: float | None
    error_code: str = ""

    @property
    def verdict(self):
        return self.report.verdict if self.report else "error"


CSV_FIXED = ("N", "radius_estimate", "growth_exponent", "verdict", "min_divisor_log10", "error_code")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    geometry: dict
    num_params: int
    metadata: dict = field(default_factory=dict)

    def header(self):
        m = self.num_params
        return (
            ["sample_index"]
            + [f"t_re_{k}" for k in range(1, m + 1)]
            + [f"t_im_{k}" for k in range(1, m + 1)]
            + list(CSV_FIXED)
        )

    def to_csv(self) -> str:
        lines = [",".join(self.header())]
        for r in self.rows:
            rep = r.report
            cells = [str(r.index)]
            cells += [_fmt(float(c.real)) for c in r.t]
            cells += [_fmt(float(c.imag)) for c in r.t]
            cells += [
                str(r.N),
                _fmt(rep.radius_upper if rep else None),
                _fmt(rep.growth_exponent if rep else None),
                r.verdict,
                _fmt(r.min_divisor_log10),
                r.error_code,
            ]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def verdict_counts(self):
        out = {}
        for r in self.rows:
            out[r.verdict] = out.get(r.verdict, 0) + 1
        return out


def sweep_point(fam, index, t, N, policy, convention=RESONANT_ERROR, cache=None):
    """Numeric linearization at one parameter point; errors land in the row.

    ``cache`` (a :class:`smalldiv.cache.CoefficientCache`) short-circuits
    one-dimensional linearizations already computed at the same germ,
    multiplier, order and precision.
    """
    try:
        germ = fam.evaluate(t, N)
        key = None
        if cache is not None and isinstance(germ, TruncSeries):
            from .cache import germ_key

            key = germ_key(germ.coeffs, fam.eig.values[0], N, fam.prec, convention)
            hit = cache.get(key)
            if hit is not None:
                meta, values = hit
                mags = values
                min_log = meta.get("min_divisor_log10")
                return SweepRow(index, t, N, radius_estimate(mags, policy), min_log)
        h, log = _linearize(germ, fam.eig, N, convention)
        mags = coefficient_magnitudes(h)
        if key is not None:
            cache.put(key, list(mags), {"min_divisor_log10": log.min_log10()})
        report = radius_estimate(mags, policy)
        return SweepRow(index, t, N, report, log.min_log10())
    except SmallDivisorError as exc:
        return SweepRow(index, t, N, None, None, exc.code)


def _sweep_task(args):
    return sweep_point(*args)


def parameter_sweep(
    fam: GermFamily,
    geometry,
    samples,
    N: int,
    seed=0,
    window_policy: WindowPolicy | None = None,
    workers: int = 1,
    resonant_convention=RESONANT_ERROR,
    cache=None,
) -> SweepTable:
    """Linearize ``fam`` numerically at each sample point of ``geometry``.

    Rows are assembled in sample order, so the table does not depend on
    ``workers``.  Per-point failures are recorded in ``error_code``.
    """
    policy = window_policy or WindowPolicy()
    rng = np.random.default_rng(seed)
    points = geometry.sample(samples, fam.num_params, rng)
    if len(points) < 2:
        raise ValueError("a sweep needs at least 2 sample points")
    tasks = [(fam, k, t, N, policy, resonant_convention, cache) for k, t in enumerate(points)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(a) for a in tasks]
    meta = {
        "thresholds": policy.as_dict(),
        "precision_bits": fam.prec,
        "seed": seed,
        "N": N,
        "samples": len(points),
        "geometry": geometry.describe(),
    }
    return SweepTable(tuple(rows), geometry.describe(), fam.num_params, meta)
