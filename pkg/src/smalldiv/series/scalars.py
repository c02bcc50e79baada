"""High-precision complex scalars.

The scalar carrier is :class:`gmpy2.mpc`: real and imaginary parts are MPFR
numbers that carry their own precision.  Arithmetic rounds to the precision
of the active gmpy2 context, which is thread-local; public operations in this
package enter :func:`working_precision` with the precision of their inputs.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import gmpy2
from gmpy2 import mpc, mpfr

DEFAULT_PREC = 256
MIN_PREC = 53

BigComplex = type(mpc(0))


def working_precision(prec: int):
    """Context manager that sets the gmpy2 working precision to ``prec`` bits."""
    if prec < MIN_PREC:
        raise ValueError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    return gmpy2.context(gmpy2.get_context(), precision=int(prec))


def current_precision() -> int:
    return gmpy2.get_context().precision


def tolerance(prec: int) -> mpfr:
    """The numeric zero threshold ``2**-(prec // 2)``."""
    with working_precision(max(prec, MIN_PREC)):
        return gmpy2.mul_2exp(mpfr(1), -(prec // 2))


def is_zero(x) -> bool:
    return gmpy2.is_zero(x)


def _parse_real(text: str) -> mpfr:
    if "/" in text:
        num, den = text.split("/")
        return mpfr(num) / mpfr(den)
    return mpfr(text)


def _split_imaginary(s: str):
    # last sign that is not the leading one and not an exponent sign
    for k in range(len(s) - 1, 0, -1):
        if s[k] in "+-" and s[k - 1] not in "eE":
            return s[:k], s[k:]
    return "", s


def parse_complex(text: str, prec: int = DEFAULT_PREC) -> BigComplex:
    """Parse ``"re+im i"`` style literals such as ``"2"``, ``"-i"``, ``"0.5-1/3 i"``."""
    s = text.replace(" ", "").replace("*", "").replace("j", "i")
    if not s:
        raise ValueError("empty complex literal")
    try:
        with working_precision(prec):
            if not s.endswith("i"):
                return mpc(_parse_real(s))
            re_txt, im_txt = _split_imaginary(s[:-1])
            if im_txt in ("", "+"):
                im_part = mpfr(1)
            elif im_txt == "-":
                im_part = mpfr(-1)
            else:
                im_part = _parse_real(im_txt)
            re_part = _parse_real(re_txt) if re_txt else mpfr(0)
            return mpc(re_part, im_part)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse complex literal {text!r}") from exc


def to_big(x, prec: int = DEFAULT_PREC) -> BigComplex:
    """Convert numbers and literals to an ``mpc`` rounded to ``prec`` bits."""
    with working_precision(prec):
        if isinstance(x, str):
            return parse_complex(x, prec)
        if isinstance(x, Fraction) or (isinstance(x, Rational) and not isinstance(x, Integral)):
            return mpc(mpfr(x.numerator) / mpfr(x.denominator))
        if isinstance(x, complex):
            return mpc(mpfr(x.real), mpfr(x.imag))
        return mpc(x) + 0  # "+ 0" rounds to the context precision


def format_real(x, digits: int = 17) -> str:
    if not isinstance(x, type(mpfr(0))):
        x = mpfr(x)
    if gmpy2.is_infinite(x):
        return "inf" if x > 0 else "-inf"
    if gmpy2.is_nan(x):
        return "nan"
    return f"{x:.{digits}g}"


def format_complex(z, digits: int = 20) -> str:
    """Inverse of :func:`parse_complex` (to ``digits`` significant digits)."""
    if not isinstance(z, type(mpc(0))):
        z = mpc(z)
    re_s = f"{z.real:.{digits}g}"
    im = z.imag
    sign = "-" if im < 0 else "+"
    return f"{re_s}{sign}{abs(im):.{digits}g}i"


def unit_circle(angle, prec: int = DEFAULT_PREC) -> BigComplex:
    """``exp(2 pi i angle)``; ``angle`` may be a Fraction or an mpfr."""
    with working_precision(prec + 16):
        if isinstance(angle, Fraction):
            a = mpfr(angle.numerator) / mpfr(angle.denominator)
        else:
            a = mpfr(angle)
        z = gmpy2.exp(mpc(0, 2 * gmpy2.const_pi() * a))
    with working_precision(prec):
        return z + 0
