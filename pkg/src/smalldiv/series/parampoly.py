"""Polynomials in the family parameters ``t = (t_1, ..., t_m)``.

A :class:`ParamPoly` is a sparse map from exponent tuples to ``mpc``
coefficients.  Zero coefficients are never stored and the map is kept in
sorted exponent order, so every loop over terms (and hence every rounding
sequence) is independent of how the polynomial was assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from ..errors import DimensionMismatch, RingMismatch
from .scalars import DEFAULT_PREC, to_big, working_precision


def _normalized(terms):
    return {e: terms[e] for e in sorted(terms) if not gmpy2.is_zero(terms[e])}


class ParamPoly:
    __slots__ = ("num_params", "terms")

    def __init__(self, num_params: int, terms=None, *, _trusted=False):
        if num_params < 1:
            raise ValueError("a parameter polynomial needs at least one variable")
        self.num_params = num_params
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            for e in terms:
                if len(e) != num_params or min(e) < 0:
                    raise DimensionMismatch(f"bad exponent {e} for {num_params} parameters")
            self.terms = _normalized({tuple(e): mpc(c) for e, c in terms.items()})

    @classmethod
    def constant(cls, value, num_params: int = 1, prec: int = DEFAULT_PREC):
        return cls(num_params, {(0,) * num_params: to_big(value, prec)})

    @classmethod
    def variable(cls, k: int, num_params: int = 1, prec: int = DEFAULT_PREC):
        """The coordinate polynomial ``t_k`` (0-based ``k``)."""
        e = [0] * num_params
        e[k] = 1
        return cls(num_params, {tuple(e): to_big(1, prec)})

    @classmethod
    def monomial(cls, exponent, coeff=1, prec: int = DEFAULT_PREC):
        exponent = tuple(exponent)
        return cls(len(exponent), {exponent: to_big(coeff, prec)})

    # -- structure -----------------------------------------------------
    @property
    def degree(self):
        """Total degree; ``-inf`` for the zero polynomial."""
        if not self.terms:
            return -math.inf
        return max(sum(e) for e in self.terms)

    def coefficient(self, exponent):
        return self.terms.get(tuple(exponent), mpc(0))

    def max_abs(self) -> mpfr:
        if not self.terms:
            return mpfr(0)
        return max(abs(c) for c in self.terms.values())

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.num_params == other.num_params and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "ParamPoly(0)"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"t{k + 1}^{p}" if p > 1 else f"t{k + 1}" for k, p in enumerate(e) if p)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return "ParamPoly(" + " + ".join(parts) + ")"

    def _check(self, other):
        if other.num_params != self.num_params:
            raise RingMismatch(
                f"parameter counts differ: {self.num_params} vs {other.num_params}"
            )

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ParamPoly):
            if other == 0:
                return self
            other = ParamPoly(self.num_params, {(0,) * self.num_params: mpc(other)})
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                out[e] = out[e] + c
            else:
                out[e] = c
        return ParamPoly(self.num_params, _normalized(out), _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.num_params, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if gmpy2.is_zero(c):
            return ParamPoly(self.num_params)
        return ParamPoly(
            self.num_params, _normalized({e: v * c for e, v in self.terms.items()}), _trusted=True
        )

    def __mul__(self, other):
        if not isinstance(other, ParamPoly):
            return self.scale(mpc(other))
        self._check(other)
        if not self.terms or not other.terms:
            return ParamPoly(self.num_params)
        out = {}
        if self.num_params == 1:
            for (ea,), ca in self.terms.items():
                for (eb,), cb in other.terms.items():
                    k = (ea + eb,)
                    if k in out:
                        out[k] = out[k] + ca * cb
                    else:
                        out[k] = ca * cb
        else:
            for ea, ca in self.terms.items():
                for eb, cb in other.terms.items():
                    k = tuple(x + y for x, y in zip(ea, eb))
                    if k in out:
                        out[k] = out[k] + ca * cb
                    else:
                        out[k] = ca * cb
        return ParamPoly(self.num_params, _normalized(out), _trusted=True)

    def __rmul__(self, other):
        return self.scale(mpc(other))

    def __truediv__(self, other):
        if isinstance(other, ParamPoly):
            raise TypeError("division by a parameter polynomial is not supported")
        c = mpc(other)
        return ParamPoly(
            self.num_params, _normalized({e: v / c for e, v in self.terms.items()}), _trusted=True
        )

    def evaluate(self, t):
        """Value at the parameter point ``t`` (a scalar when ``num_params == 1``)."""
        if not isinstance(t, (tuple, list)):
            t = (t,)
        if len(t) != self.num_params:
            raise DimensionMismatch(f"expected {self.num_params} parameter values, got {len(t)}")
        t = [v if isinstance(v, type(mpc(0))) else mpc(v) for v in t]
        total = mpc(0)
        powers = [{0: mpc(1)} for _ in t]
        for e, c in self.terms.items():
            term = c
            for k, p in enumerate(e):
                if p:
                    cache = powers[k]
                    if p not in cache:
                        cache[p] = t[k] ** p
                    term = term * cache[p]
            total = total + term
        return total


@dataclass(frozen=True)
class ScalarRing:
    """Coefficients are ``mpc`` numbers at ``prec`` bits."""

    prec: int = DEFAULT_PREC

    kind = "scalar"

    def zero(self):
        return mpc(0)

    def one(self):
        return mpc(1)

    def coerce(self, x):
        if isinstance(x, ParamPoly):
            raise RingMismatch("a parameter polynomial is not a scalar")
        return to_big(x, self.prec)

    @staticmethod
    def is_zero(x) -> bool:
        return gmpy2.is_zero(x)

    @staticmethod
    def magnitude(x) -> mpfr:
        return abs(x)

    @staticmethod
    def evaluate(x, t):
        return x

    def with_prec(self, prec):
        return ScalarRing(prec)


@dataclass(frozen=True)
class ParamRing:
    """Coefficients are :class:`ParamPoly` in ``num_params`` variables."""

    num_params: int = 1
    prec: int = DEFAULT_PREC

    kind = "param"

    def zero(self):
        return ParamPoly(self.num_params)

    def one(self):
        return ParamPoly.constant(1, self.num_params, self.prec)

    def coerce(self, x):
        if isinstance(x, ParamPoly):
            if x.num_params != self.num_params:
                raise RingMismatch("parameter count mismatch")
            return x
        with working_precision(self.prec):
            return ParamPoly(self.num_params, {(0,) * self.num_params: to_big(x, self.prec)})

    @staticmethod
    def is_zero(x) -> bool:
        return not x.terms

    @staticmethod
    def magnitude(x) -> mpfr:
        return x.max_abs()

    @staticmethod
    def evaluate(x, t):
        return x.evaluate(t)

    def with_prec(self, prec):
        return ParamRing(self.num_params, prec)


def common_ring(a, b):
    """The ring two operands share; precision is the smaller of the two."""
    if a.kind != b.kind or getattr(a, "num_params", None) != getattr(b, "num_params", None):
        raise RingMismatch(f"incompatible coefficient rings {a} and {b}")
    return a if a.prec <= b.prec else b
