"""Formal centralizer candidates ``g = h^{-1}(mu h(z))`` of a germ ``f``.

``g`` commutes with ``f`` formally for every ``mu``; whether it converges is
the question, and :class:`CentralizerProbe` only carries diagnostics for it
(coefficient growth and, when ``alpha`` is known, Moser's simultaneous
approximation check).
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .arithmetic import MoserQuery, MoserResult, RotationNumber, moser_pair_check, parse_rotation_number
from .errors import InversionFailure, TruncationTooShort
from .families import RadiusReport, coefficient_magnitudes, radius_estimate
from .linearization import (
    GUARD_AUTO,
    RESONANT_ERROR,
    EigenData,
    _agreement_bits,
    _as_eigen,
    _guarded,
    _solve_1d,
    linearize_germ_1d,
)
from .series.scalars import tolerance, working_precision
from .series.univariate import TruncSeries, compose, revert, series_arith


@dataclass(frozen=True)
class CentralizerProbe:
    f: TruncSeries
    alpha: RotationNumber | None
    beta: RotationNumber
    g: TruncSeries
    h: TruncSeries
    growth: RadiusReport | None
    residual: mpfr
    moser: MoserResult | None = None

    @property
    def multiplier(self):
        return self.g.coeffs[1]

    def rotation_number(self):
        return rotation_number_of(self.g)


def rotation_number_of(g: TruncSeries):
    """``(2 pi i)^{-1} log g'(0)`` reduced to ``[0, 1)`` (real part)."""
    with working_precision(g.ring.prec):
        mu = g.coeffs[1]
        theta = gmpy2.atan2(mu.imag, mu.real) / (2 * gmpy2.const_pi())
        if theta < 0:
            theta += 1
        return theta


def commutator_residual(f: TruncSeries, g: TruncSeries, N: int):
    """Max coefficient magnitude of ``g o f - f o g`` through order ``N``."""
    if f.order < N or g.order < N:
        raise TruncationTooShort(f"truncations {f.order}, {g.order} are shorter than {N}")
    ring = f.ring
    with working_precision(ring.prec):
        a = compose(g.truncate(N), f.truncate(N), N)
        b = compose(f.truncate(N), g.truncate(N), N)
        return max((ring.magnitude(x - y) for x, y in zip(a.coeffs, b.coeffs)), default=mpfr(0))


def _build(f, eig, mu_rot, N, W, convention, tol):
    ring = f.ring.with_prec(W)
    with working_precision(W):
        coeffs, _ = _solve_1d(f.coeffs, eig.with_prec(W), N, convention, tol, ring)
        h = TruncSeries(tuple(coeffs), ring)
        try:
            k = revert(h, N)
        except InversionFailure as exc:  # h has unit linear part, so this cannot happen
            raise AssertionError("linearizer with unit linear part failed to invert") from exc
        mu = mu_rot.multiplier(W)
        g = compose(k, series_arith("scale", h, mu), N)
    return g, h


def centralizer_candidate(
    f: TruncSeries,
    lam,
    beta,
    N: int,
    moser: tuple | None = None,
    resonant_convention=RESONANT_ERROR,
    guard_bits=GUARD_AUTO,
) -> CentralizerProbe:
    """The formal centralizer element with multiplier ``exp(2 pi i beta)``.

    Parameters
    ----------
    f : TruncSeries
        Germ ``lambda z + O(z^2)``, truncated at ``N`` or beyond.
    lam : RotationNumber, EigenData, literal or number
        The multiplier of ``f``; rotation-number input also fixes ``alpha``.
    beta : RotationNumber or literal
        Rotation number of the candidate.
    N : int
        Truncation order.
    moser : (gamma, tau, q_max), optional
        Run :func:`moser_pair_check` on ``(alpha, beta)`` alongside.

    Returns
    -------
    CentralizerProbe
        ``g``, the linearizer ``h``, the growth report for ``g`` (when
        ``N >= 16``) and the commutator residual with ``f``.
    """
    prec = f.ring.prec
    alpha = None
    if isinstance(lam, EigenData):
        eig = lam
        if lam.tags[0] == "angle":
            alpha = lam.exact[0]
    elif isinstance(lam, (RotationNumber, str)):
        alpha = parse_rotation_number(lam, prec)
        eig = EigenData.from_angles([alpha], prec)
    else:
        eig = _as_eigen(lam, 1, prec)
    beta = parse_rotation_number(beta, prec)
    # validates f against the multiplier and surfaces resonances early
    linearize_germ_1d(f, eig, min(N, 2), resonant_convention, guard_bits=0)
    tol = tolerance(prec)

    def solve(W):
        return _build(f, eig, beta, N, W, resonant_convention, tol)

    def compare(a, b):
        return _agreement_bits(zip(a[0].coeffs, b[0].coeffs), f.ring, prec)

    g, h = _guarded(solve, compare, prec, N, guard_bits)
    ring = f.ring
    with working_precision(prec):
        g = TruncSeries(tuple(c + 0 for c in g.coeffs), ring)
        h = TruncSeries(tuple(c + 0 for c in h.coeffs), ring)
    growth = radius_estimate(coefficient_magnitudes(g)) if N >= 16 else None
    residual = commutator_residual(f.truncate(N), g, N)
    moser_result = None
    if moser is not None and alpha is not None:
        gamma, tau, q_max = moser
        moser_result = moser_pair_check(MoserQuery(alpha, beta, gamma, tau, q_max))
    return CentralizerProbe(f, alpha, beta, g, h, growth, residual, moser_result)
