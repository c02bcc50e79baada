"""Continued fractions, Bruno sums and Diophantine checks for rotation numbers.

Rotation numbers carry an explicit precision.  Continued-fraction expansion
runs Euclid's algorithm exactly on the dyadic rational held at that
precision, so quotients never depend on floating-point rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import EmptyExpansion, InsufficientDepth, NotInUnitInterval, ScheduleOverflow
from .series.scalars import DEFAULT_PREC, unit_circle, working_precision

DIGIT_BUDGET = 10**6

BRUNO_LIKE = "bruno-like"
NON_BRUNO_LIKE = "non-bruno-like"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class ContinuedFraction:
    integer_part: int
    quotients: tuple
    precision_exhausted: bool = False

    def __post_init__(self):
        if any(int(a) < 1 for a in self.quotients):
            raise ValueError("partial quotients must be positive integers")

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def convergents(self):
        return convergents(self)

    def value(self, prec=DEFAULT_PREC):
        """The rational ``[a_0; a_1, ..., a_k]`` rounded to ``prec`` bits."""
        p, q = self.convergents()[-1] if self.quotients else (self.integer_part, 1)
        with working_precision(prec):
            return mpfr(p) / mpfr(q)


def convergents(cf: ContinuedFraction):
    """Exact convergents ``(p_n, q_n)`` for ``n = 1..depth``."""
    if cf.depth < 1:
        raise EmptyExpansion("continued fraction has no partial quotients")
    p_prev, q_prev = 1, 0
    p, q = cf.integer_part, 1
    out = []
    for a in cf.quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append((p, q))
    return out


def _denominators(cf):
    """``q_0, q_1, ..., q_depth``."""
    qs = [1]
    q_prev = 0
    for a in cf.quotients:
        qs.append(a * qs[-1] + q_prev)
        q_prev = qs[-2]
    return qs


# -- schedules --------------------------------------------------------------

_SCHED_RE = re.compile(r"^\s*a\s*=\s*(?P<expr>[^,]+?)\s*(?:,\s*depth\s*=\s*(?P<depth>\d+))?\s*$")


@dataclass(frozen=True)
class Schedule:
    """A rule ``a_{k+1} = F(q_k)`` for building Liouville/Cremer-type numbers.

    ``kind`` is ``"const"`` (``a = c``), ``"power"`` (``a = c^q``) or
    ``"self"`` (``a = q^q``).
    """

    kind: str
    base: int = 1
    text: str = ""

    @classmethod
    def parse(cls, expr: str):
        e = expr.replace(" ", "")
        if e == "q^q":
            return cls("self", text=f"a={e}")
        m = re.fullmatch(r"(\d+)\^q", e)
        if m:
            return cls("power", int(m.group(1)), text=f"a={e}")
        if re.fullmatch(r"\d+", e) and int(e) >= 1:
            return cls("const", int(e), text=f"a={e}")
        raise ValueError(f"unsupported schedule expression {expr!r}")

    def log10(self, q: int) -> float:
        """Decimal digit estimate of ``F(q)``, computed without forming it."""
        if self.kind == "const":
            return math.log10(self.base)
        try:
            qf = float(q)
        except OverflowError:
            return math.inf
        if self.kind == "power":
            return qf * math.log10(self.base)
        return qf * float(_log10_int(q)) if q > 1 else 0.0

    def __call__(self, q: int) -> int:
        if self.kind == "const":
            return self.base
        if self.kind == "power":
            return int(mpz(self.base) ** q)
        return int(mpz(q) ** q)


def _log10_int(n: int) -> float:
    return gmpy2.log10(mpfr(n)) if n > 0 else 0.0


def make_liouville(schedule, depth: int, digit_budget: int = DIGIT_BUDGET) -> ContinuedFraction:
    """Continued fraction with ``a_{k+1} = schedule(q_k)`` for ``depth`` quotients.

    Raises :class:`ScheduleOverflow` (with the depth reached) as soon as some
    ``q_n`` would exceed ``digit_budget`` decimal digits.
    """
    if isinstance(schedule, str):
        schedule = Schedule.parse(schedule.split("=", 1)[-1] if "=" in schedule else schedule)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    quotients = []
    q_prev, q = 0, 1
    for k in range(depth):
        # q_{k+1} = a q_k + q_{k-1} has about log10(a) + log10(q_k) digits
        if schedule.log10(q) + float(_log10_int(q)) > digit_budget:
            raise ScheduleOverflow(k)
        a = schedule(q)
        if a < 1:
            raise ValueError("schedule produced a non-positive quotient")
        quotients.append(a)
        q, q_prev = a * q + q_prev, q
    return ContinuedFraction(0, tuple(quotients))


def _schedule_quotients_to_precision(schedule, prec, digit_budget=DIGIT_BUDGET):
    """Quotients of the schedule number until the tail is below ``2^-(prec+16)``."""
    quotients = []
    q_prev, q = 0, 1
    while True:
        if schedule.log10(q) + float(_log10_int(q)) > digit_budget:
            break
        a = schedule(q)
        quotients.append(a)
        q, q_prev = a * q + q_prev, q
        # |alpha - p_k/q_k| < 1/q_k^2
        if 2 * (q.bit_length() - 1) > prec + 16:
            break
    return tuple(quotients)


# -- rotation numbers -------------------------------------------------------


@dataclass(frozen=True)
class RotationNumber:
    """A real rotation number with its provenance.

    ``exact`` is set for rational numbers.  ``quotients`` holds leading
    partial quotients when they are known a priori (tags, lists, schedules).
    ``symbol`` names the irrational so that exact resonance tests can tell
    when two eigenvalues share the same angle.
    """

    value: mpfr
    prec: int
    source: str
    literal: str
    exact: Fraction | None = None
    quotients: tuple | None = None
    symbol: str | None = field(default=None)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def multiplier(self, prec=None):
        """``exp(2 pi i value)``."""
        prec = prec or self.prec
        return unit_circle(self.exact if self.exact is not None else self.value, prec)

    def continued_fraction(self, depth: int) -> ContinuedFraction:
        if self.quotients is not None and len(self.quotients) >= depth:
            return ContinuedFraction(0, self.quotients[:depth])
        return cf_expand(self.value, depth, self.prec)

    def __float__(self):
        return float(self.value)


def _rotation_from_quotients(quotients, prec, literal, source, golden_tail):
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    with working_precision(prec + 32):
        if golden_tail:
            # complete quotient of the all-ones tail
            x = (1 + gmpy2.sqrt(mpfr(5))) / 2
            value = (x * p + p_prev) / (x * q + q_prev)
        else:
            value = mpfr(p) / mpfr(q)
    with working_precision(prec):
        value = value + 0
    exact = None if golden_tail else Fraction(p, q)
    symbol = literal if golden_tail else None
    return RotationNumber(value, prec, source, literal, exact, tuple(quotients), symbol)


def parse_rotation_number(text, prec: int = DEFAULT_PREC) -> RotationNumber:
    """Parse a rotation-number literal.

    Accepted forms: decimal strings and ``p/q`` (exact rationals), the tags
    ``golden`` and ``sqrt2m1``, quotient lists ``[0;a1,...,ak]`` (rational)
    or ``[0;a1,...,ak,...]`` (continued with a tail of ones), and schedules
    ``sched:a=10^q``, ``sched:a=q^q``, ``sched:a=3`` (optionally
    ``,depth=K`` to fix how many quotients the stored expansion exposes).
    """
    if isinstance(text, RotationNumber):
        return text
    if isinstance(text, Fraction):
        exact = text
        with working_precision(prec):
            value = mpfr(exact.numerator) / mpfr(exact.denominator)
        return RotationNumber(value, prec, "fraction", str(text), exact)
    s = str(text).strip()
    with working_precision(prec):
        if s == "golden":
            value = (gmpy2.sqrt(mpfr(5)) - 1) / 2
            return RotationNumber(value, prec, "surd", s, None, None, "golden")
        if s == "sqrt2m1":
            value = gmpy2.sqrt(mpfr(2)) - 1
            return RotationNumber(value, prec, "surd", s, None, None, "sqrt2m1")
    if s.startswith("["):
        body = s.strip("[]").replace(" ", "")
        head, _, rest = body.partition(";")
        if int(head or 0) != 0:
            raise NotInUnitInterval("rotation-number quotient lists must have integer part 0")
        parts = [p for p in rest.split(",") if p]
        tail = bool(parts) and parts[-1] in ("...", "…")
        if tail:
            parts = parts[:-1]
        quotients = tuple(int(p) for p in parts)
        if not quotients:
            raise EmptyExpansion("empty quotient list")
        return _rotation_from_quotients(quotients, prec, s, "quotients", tail)
    if s.startswith("sched:"):
        m = _SCHED_RE.match(s[len("sched:"):])
        if m is None:
            raise ValueError(f"cannot parse schedule literal {s!r}")
        schedule = Schedule.parse(m.group("expr"))
        quotients = _schedule_quotients_to_precision(schedule, prec)
        rot = _rotation_from_quotients(quotients, prec, s, "schedule", golden_tail=False)
        if schedule.kind == "const" and schedule.base == 1:
            # the all-ones schedule is the golden mean itself
            return _rotation_from_quotients((1,), prec, s, "schedule", golden_tail=True)
        depth = int(m.group("depth")) if m.group("depth") else len(quotients)
        exposed = make_liouville(schedule, depth).quotients if depth > len(quotients) else quotients[:depth]
        # an infinite schedule is irrational; the tail beyond the budget is below precision
        return RotationNumber(rot.value, prec, "schedule", s, None, tuple(exposed), s)
    try:
        exact = Fraction(s)
    except ValueError as exc:
        raise ValueError(f"cannot parse rotation number {s!r}") from exc
    with working_precision(prec):
        value = mpfr(exact.numerator) / mpfr(exact.denominator)
    return RotationNumber(value, prec, "decimal", s, exact)


# -- operations -------------------------------------------------------------


def _as_dyadic(x, prec):
    with working_precision(prec):
        if isinstance(x, RotationNumber):
            if x.exact is not None:
                return x.exact
            x = x.value
        elif isinstance(x, Fraction):
            return x
        elif isinstance(x, str):
            x = parse_rotation_number(x, prec)
            return x.exact if x.exact is not None else Fraction(*x.value.as_integer_ratio())
        x = mpfr(x)
        return Fraction(*x.as_integer_ratio())


def cf_expand(x, depth: int, prec_bits: int = DEFAULT_PREC) -> ContinuedFraction:
    """Partial quotients of ``x`` in (0, 1), up to ``depth`` of them.

    The expansion stops early, with ``precision_exhausted`` set, once
    ``|x - p_k/q_k|`` drops below ``2^-(prec_bits/2)`` or the expansion
    terminates (``x`` rational at working precision).
    """
    if prec_bits < 64:
        raise ValueError("cf_expand needs at least 64 bits of precision")
    r = _as_dyadic(x, prec_bits)
    if not 0 < r < 1:
        raise NotInUnitInterval(f"{float(r)} is not in (0, 1)")
    threshold = Fraction(1, 2 ** (prec_bits // 2))
    num, den = int(r.numerator), int(r.denominator)
    quotients = []
    exhausted = False
    p_prev, q_prev, p, q = 1, 0, 0, 1
    # Euclid on r = num/den: the first quotient comes from den/num
    num, den = den, num
    while len(quotients) < depth:
        a, rem = divmod(num, den)
        a = int(a)
        quotients.append(a)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if rem == 0:
            exhausted = len(quotients) < depth
            break
        num, den = den, rem
        if len(quotients) < depth and abs(r - Fraction(p, q)) < threshold:
            exhausted = True
            break
    return ContinuedFraction(0, tuple(quotients), exhausted)


@dataclass(frozen=True)
class BrunoResult:
    partial_sum: mpfr
    verdict: str
    terms: tuple


def bruno_sum(cf: ContinuedFraction, depth: int, *, tail_tol=1e-6, floor=0.1, prec=DEFAULT_PREC):
    """Partial Bruno sum ``sum_{n<depth} log(q_{n+1}) / q_n`` and a window verdict.

    The verdict looks at the last ``ceil(depth/4)`` terms: ``bruno-like`` if
    they sum below ``tail_tol``, ``non-bruno-like`` if each is at least
    ``floor``, ``undecided`` otherwise.  It is a heuristic, never a proof.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth > cf.depth - 1:
        raise InsufficientDepth(f"need depth <= {cf.depth - 1}, got {depth}")
    qs = _denominators(cf)
    with working_precision(prec):
        terms = tuple(gmpy2.log(mpfr(qs[n + 1])) / mpfr(qs[n]) for n in range(depth))
        total = mpfr(0)
        for t in terms:
            total += t
    if depth == 0:
        return BrunoResult(total, UNDECIDED, terms)
    window = terms[-math.ceil(depth / 4):]
    with working_precision(prec):
        tail = sum(window, mpfr(0))
    if tail < tail_tol:
        verdict = BRUNO_LIKE
    elif min(window) >= floor:
        verdict = NON_BRUNO_LIKE
    else:
        verdict = UNDECIDED
    return BrunoResult(total, verdict, terms)


@dataclass(frozen=True)
class MoserQuery:
    alpha: RotationNumber
    beta: RotationNumber
    gamma: float
    tau: float
    q_max: int

    def __post_init__(self):
        if not self.gamma > 0 or not self.tau > 0:
            raise ValueError("gamma and tau must be positive")
        if self.q_max < 1:
            raise ValueError("q_max must be at least 1")


@dataclass(frozen=True)
class MoserResult:
    holds: bool
    witness: tuple | None


def _nearest_distance(x, q):
    """``(|q x - p|, p)`` with ``p`` the nearest integer to ``q x``."""
    if isinstance(x, Fraction):
        y = x * q
        p = round(y)
        d = abs(y - p)
        return mpfr(d.numerator) / mpfr(d.denominator), p
    y = x * q
    p = gmpy2.rint(y)
    return abs(y - p), int(p)


def moser_pair_check(query: MoserQuery) -> MoserResult:
    """Scan ``1 <= q <= q_max`` for ``min(|q a - p1|, |q b - p2|) < gamma / q^tau``.

    ``p1``, ``p2`` are the nearest integers, which minimize both distances.
    Returns the smallest violating ``(q, p1, p2)`` as the witness.
    """
    prec = max(query.alpha.prec, query.beta.prec)
    a = query.alpha.exact if query.alpha.exact is not None else query.alpha.value
    b = query.beta.exact if query.beta.exact is not None else query.beta.value
    with working_precision(prec):
        gamma = mpfr(query.gamma)
        tau = mpfr(query.tau)
        integer_tau = tau == int(tau)
        for q in range(1, query.q_max + 1):
            da, p1 = _nearest_distance(a, q)
            db, p2 = _nearest_distance(b, q)
            d = da if da < db else db
            bound = gamma / (mpfr(q) ** int(tau) if integer_tau else mpfr(q) ** tau)
            if d < bound:
                return MoserResult(False, (q, p1, p2))
    return MoserResult(True, None)
