"""Rationals, places of Q, local log-sizes and the affine Weil height.

Rationals are ``fractions.Fraction``.  Non-archimedean log-sizes stay
symbolic as ``coeff * log p`` with a rational ``coeff``; archimedean ones are
outward-rounded intervals.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence, Union

import gmpy2
import mpmath

from . import interval as ivl

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")

DEFAULT_LOG_TOL = 2.0 ** -40


class ArgumentError(ValueError):
    """Raised on malformed or out-of-contract arguments."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` with an optional leading minus, no whitespace."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ArgumentError(f"malformed rational {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ArgumentError(f"zero denominator in {text!r}") from None


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Place:
    """An absolute value of Q: ``prime=None`` is the archimedean place."""

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None and not gmpy2.is_prime(self.prime):
            raise ArgumentError(f"{self.prime} is not prime")

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    def sort_key(self):
        return (0, 0) if self.prime is None else (1, self.prime)

    def __lt__(self, other: "Place"):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "inf" if self.prime is None else str(self.prime)

    @classmethod
    def parse(cls, text: str) -> "Place":
        if text in ("inf", "oo", "infinity", "arch"):
            return cls()
        try:
            return cls(int(text))
        except ValueError as exc:
            raise ArgumentError(f"bad place {text!r}") from exc


INF = Place()


def prime(p: int) -> Place:
    return Place(p)


# -- log sizes ---------------------------------------------------------------


@dataclass(frozen=True)
class NegInfinity:
    """log|0|."""

    def lower(self):
        return ivl.NEG_INF

    def upper(self):
        return ivl.NEG_INF


NEG_INFINITY = NegInfinity()


@dataclass(frozen=True)
class ExactNonArch:
    """The real number ``coeff * log(p)``."""

    coeff: Fraction
    p: int

    def enclosure(self, ctx=None):
        ctx = ctx or ivl.ivctx()
        return ivl.from_rational(self.coeff, ctx) * ctx.log(ctx.mpf(self.p))

    def lower(self):
        return ivl.lo(self.enclosure())

    def upper(self):
        return ivl.hi(self.enclosure())


@dataclass(frozen=True)
class ArchInterval:
    """A real interval ``[lo, hi]`` in natural-log units."""

    lo: mpmath.mpf
    hi: mpmath.mpf

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @classmethod
    def of(cls, x) -> "ArchInterval":
        return cls(ivl.lo(x), ivl.hi(x))

    def enclosure(self, ctx=None):
        ctx = ctx or ivl.ivctx()
        return ctx.mpf([self.lo, self.hi])

    def lower(self):
        return self.lo

    def upper(self):
        return self.hi

    @property
    def width(self) -> float:
        return ivl.width(self.enclosure())


LogSize = Union[NegInfinity, ExactNonArch, ArchInterval]


def log_size_enclosure(ls: LogSize, ctx=None):
    """Interval enclosure of a LogSize, or ``None`` for -inf."""
    if isinstance(ls, NegInfinity):
        return None
    return ls.enclosure(ctx)


def log_plus(ls: LogSize, v: "Place | None" = None) -> LogSize:
    """max(0, ls), keeping exactness; ``v`` fixes the type of log+(-inf) = 0."""
    if isinstance(ls, NegInfinity):
        if v is not None and not v.is_archimedean:
            return ExactNonArch(Fraction(0), v.prime)
        return ArchInterval(mpmath.mpf(0), mpmath.mpf(0))
    if isinstance(ls, ExactNonArch):
        return ExactNonArch(max(ls.coeff, Fraction(0)), ls.p)
    return ArchInterval(max(ls.lo, mpmath.mpf(0)), max(ls.hi, mpmath.mpf(0)))


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ArgumentError("valuation of zero")
    return _vp(x.numerator, p) - _vp(x.denominator, p)


def _vp(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ArgumentError("valuation of zero")
    return int(gmpy2.remove(n, p)[1])


def abs_log(x, v: Place, tol: float = DEFAULT_LOG_TOL) -> LogSize:
    """log|x|_v: exact ``-v_p(x) log p`` at primes, an enclosure at infinity."""
    x = Fraction(x)
    if x == 0:
        return NEG_INFINITY
    if v.is_archimedean:
        prec = ivl.DEFAULT_PREC
        while True:
            enc = ivl.log_abs_rational(x, ivl.ivctx(prec))
            if ivl.width(enc) <= tol:
                return ArchInterval.of(enc)
            prec *= 2
    return ExactNonArch(Fraction(-valuation(x, v.prime)), v.prime)


def _max_logsize(sizes: Sequence[LogSize]) -> LogSize:
    best: LogSize = NEG_INFINITY
    for s in sizes:
        if isinstance(s, NegInfinity):
            continue
        if isinstance(best, NegInfinity):
            best = s
        elif isinstance(s, ExactNonArch):
            best = s if s.coeff > best.coeff else best
        else:
            best = ArchInterval(max(best.lo, s.lo), max(best.hi, s.hi))
    return best


def tuple_sup_log(xs: Sequence, v: Place, tol: float = DEFAULT_LOG_TOL) -> LogSize:
    """log max_i |x_i|_v."""
    if len(xs) == 0:
        raise ArgumentError("empty tuple")
    if v.is_archimedean:
        biggest = max(abs(Fraction(x)) for x in xs)
        return abs_log(biggest, v, tol)
    return _max_logsize([abs_log(x, v) for x in xs])


@dataclass(frozen=True)
class HeightValue:
    """Enclosure ``[lo, hi]`` of a height; ``value``/``error`` give midpoint and half-width."""

    lo: mpmath.mpf
    hi: mpmath.mpf

    @classmethod
    def of(cls, x) -> "HeightValue":
        return cls(ivl.lo(x), ivl.hi(x))

    @classmethod
    def exact_zero(cls) -> "HeightValue":
        return cls(mpmath.mpf(0), mpmath.mpf(0))

    def enclosure(self, ctx=None):
        ctx = ctx or ivl.ivctx()
        return ctx.mpf([self.lo, self.hi])

    @property
    def value(self) -> float:
        return float(self.enclosure().mid)

    @property
    def error(self) -> float:
        enc = self.enclosure()
        return max(ivl.up(ivl.hi(enc - enc.mid)), ivl.up(ivl.hi(enc.mid - enc)))

    def to_json(self) -> dict:
        return {"value": self.value, "error": self.error,
                "lower": ivl.down(self.lo), "upper": ivl.up(self.hi)}


def height(xs: Sequence) -> HeightValue:
    """Affine Weil height sum_v log^+ max_i |x_i|_v of a rational tuple.

    With L the lcm of the denominators this is log max(L, max_i |L x_i|).
    """
    if len(xs) == 0:
        raise ArgumentError("empty tuple")
    xs = [Fraction(x) for x in xs]
    lcm = reduce(math.lcm, (x.denominator for x in xs), 1)
    top = max([lcm] + [abs(x.numerator) * (lcm // x.denominator) for x in xs])
    return HeightValue.of(ivl.log_int(top))


@lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple[int, ...]:
    n = abs(n)
    if n <= 1:
        return ()
    from sympy import factorint

    return tuple(sorted(factorint(n)))


def support_primes(xs: Iterable, numerators: bool = True) -> list[int]:
    """Primes dividing some denominator (and, optionally, numerator) of ``xs``."""
    ps: set[int] = set()
    for x in xs:
        x = Fraction(x)
        ps.update(prime_factors(x.denominator))
        if numerators and x != 0:
            ps.update(prime_factors(x.numerator))
    return sorted(ps)


def relevant_places(xs: Sequence, numerators: bool = True) -> list[Place]:
    """Archimedean place, then the primes in the support of ``xs``, ascending."""
    if len(xs) == 0:
        raise ArgumentError("empty tuple")
    return [INF] + [Place(p) for p in support_primes(xs, numerators)]


def product_formula_residual(x) -> tuple[Fraction, object]:
    """Check sum_v log|x|_v = 0 for nonzero rational x.

    Returns ``(exact_product, enclosure)``: ``exact_product`` is
    ``|x|_inf * prod_p p^coeff_p`` computed in Q (must equal 1), and
    ``enclosure`` is an interval for the full sum (must contain 0).
    """
    x = Fraction(x)
    if x == 0:
        raise ArgumentError("product formula needs x != 0")
    ctx = ivl.ivctx()
    total = ivl.log_abs_rational(x, ctx)
    prod = abs(x)
    for v in relevant_places([x])[1:]:
        s = abs_log(x, v)
        prod *= Fraction(v.prime) ** int(s.coeff)
        total = total + s.enclosure(ctx)
    return prod, total
