"""Transfinite diameter, Bernstein growth factors and thinness probes.

Logarithmic capacity of a compact set in the plane equals its transfinite
diameter ``lim d_n``, with ``d_n`` the maximal geometric-mean pairwise
distance of ``n`` points.  Here it is estimated from finite samples, by
exhaustive search on small inputs and greedily otherwise.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import TooFewPoints, UnsupportedDomain

EXACT_LIMIT = 12
EXACT = "exact"
GREEDY = "greedy"


@dataclass(frozen=True)
class FeketeEntry:
    n: int
    indices: tuple
    points: tuple
    d_n: float
    strategy: str

    @property
    def greedy(self):
        return self.strategy == GREEDY


def _as_points(points):
    arr = np.asarray(list(points), dtype=complex).ravel()
    return arr


def _log_diameter(pts):
    """``(2 / (n (n-1))) * sum_{i<j} log |z_i - z_j|``."""
    n = len(pts)
    diff = np.abs(pts[:, None] - pts[None, :])
    iu = np.triu_indices(n, k=1)
    d = diff[iu]
    if np.any(d == 0):
        return -math.inf
    return 2.0 * float(np.sum(np.log(d))) / (n * (n - 1))


def _greedy(pts, n):
    centre = pts.mean()
    first = int(np.argmax(np.abs(pts - centre)))
    chosen = [first]
    score = np.zeros(len(pts))
    taken = np.zeros(len(pts), dtype=bool)
    taken[first] = True
    for _ in range(n - 1):
        with np.errstate(divide="ignore"):
            score += np.log(np.abs(pts - pts[chosen[-1]]))
        masked = np.where(taken, -np.inf, score)
        k = int(np.argmax(masked))
        chosen.append(k)
        taken[k] = True
    return tuple(chosen)


def _exact(pts, n):
    best, best_val = None, -math.inf
    for combo in combinations(range(len(pts)), n):
        val = _log_diameter(pts[list(combo)])
        if val > best_val:
            best, best_val = combo, val
    if best is None:
        best = tuple(range(n))
    return best


def fekete_diameter(points, n: int, strategy: str = "auto") -> FeketeEntry:
    """Approximate Fekete ``n``-tuple and its ``d_n``.

    Parameters
    ----------
    points : iterable of complex
        Candidate points.
    n : int
        Tuple size, ``2 <= n <= len(points)``.
    strategy : {"auto", "exact", "greedy"}
        ``exact`` enumerates all ``n``-subsets (at most 12 points); ``greedy``
        starts from the point farthest from the centroid and repeatedly adds
        the point maximizing the product of distances to those chosen.
        ``auto`` is exact when allowed.
    """
    pts = _as_points(points)
    if n < 2 or n > len(pts):
        raise TooFewPoints(f"need 2 <= n <= {len(pts)}, got n={n}")
    if strategy == "auto":
        strategy = EXACT if len(pts) <= EXACT_LIMIT else GREEDY
    if strategy == EXACT:
        if len(pts) > EXACT_LIMIT:
            raise ValueError(f"exact search is limited to {EXACT_LIMIT} points")
        idx = _exact(pts, n)
    elif strategy == GREEDY:
        idx = _greedy(pts, n)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    chosen = pts[list(idx)]
    ld = _log_diameter(chosen)
    d = 0.0 if ld == -math.inf else math.exp(ld)
    return FeketeEntry(n, tuple(idx), tuple(complex(z) for z in chosen), d, strategy)


@dataclass(frozen=True)
class CapacitySample:
    points: tuple
    entries: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,d_n,strategy,point_count\n")
        for e in self.entries:
            buf.write(f"{e.n},{e.d_n!r},{e.strategy},{len(self.points)}\n")
        return buf.getvalue()


def capacity_sample(points, orders, strategy: str = "auto") -> CapacitySample:
    pts = tuple(complex(z) for z in points)
    return CapacitySample(pts, tuple(fekete_diameter(pts, n, strategy) for n in orders))


# -- Bernstein factors -------------------------------------------------------
@dataclass(frozen=True)
class Disk:
    center: complex = 0j
    radius: float = 1.0


@dataclass(frozen=True)
class Segment:
    a: complex = -1.0
    b: complex = 1.0


def bernstein_factor(domain, n: int, z, prec: int = 113):
    """``exp(n g_E(z))`` for the Green function of a disk or a segment.

    Disk: ``(|z - c| / R)^n`` outside, 1 inside.  Segment ``[a, b]``:
    ``|w + sqrt(w^2 - 1)|^n`` with ``w = (2z - a - b) / (b - a)`` and the
    root branch of modulus at least 1.  Returned as an mpfr.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        zc = mpc(complex(z))
        if isinstance(domain, Disk):
            if not domain.radius > 0:
                raise UnsupportedDomain("disk radius must be positive")
            ratio = abs(zc - mpc(complex(domain.center))) / mpfr(domain.radius)
            if ratio <= 1:
                return mpfr(1)
            return ratio**n
        if isinstance(domain, Segment):
            a, b = mpc(complex(domain.a)), mpc(complex(domain.b))
            if a == b:
                raise UnsupportedDomain("degenerate segment")
            w = (2 * zc - a - b) / (b - a)
            root = gmpy2.sqrt(w * w - 1)
            phi = max(abs(w + root), abs(w - root))
            if phi <= 1:
                return mpfr(1)
            return phi**n
    raise UnsupportedDomain(f"unsupported domain {domain!r}")


# -- polar probing -----------------------------------------------------------
class PolarProbe(NamedTuple):
    flagged_capacity: float
    reference_capacity: float
    thinness_ratio: float


PROBE_ORDER = 40


def _probe_estimate(points):
    if len(points) < 2:
        return 0.0
    n = min(PROBE_ORDER, len(points))
    return fekete_diameter(points, n, GREEDY).d_n


def polar_probe(line_samples) -> PolarProbe:
    """Greedy transfinite diameters of flagged samples versus all samples.

    ``line_samples`` holds ``(t, flagged)`` pairs.  Fewer than two flagged
    points give a flagged estimate of 0; the ratio is reported as
    ``thinness_ratio`` (small values mean the flagged set looks thin).
    """
    samples = [(complex(t), bool(flag)) for t, flag in line_samples]
    if len(samples) < 2:
        raise TooFewPoints("polar_probe needs at least 2 samples")
    everything = [t for t, _ in samples]
    flagged = [t for t, flag in samples if flag]
    ref = _probe_estimate(everything)
    est = _probe_estimate(flagged)
    ratio = est / ref if ref > 0 else 0.0
    return PolarProbe(est, ref, ratio)
