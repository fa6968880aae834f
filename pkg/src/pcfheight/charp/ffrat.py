"""The rational function field F_p(t), its places and normalized absolute values.

Polynomials in t are tuples of ints mod p, highest degree first (the
``sympy.polys.galoistools`` convention).  Sizes are reported in units of
log p: ``ff_abs_log(x, Infinity) = deg num - deg den`` and
``ff_abs_log(x, Finite(pi)) = -ord_pi(x) * deg pi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add,
    gf_div,
    gf_factor,
    gf_gcd,
    gf_irreducible_p,
    gf_monic,
    gf_mul,
    gf_neg,
    gf_quo,
)

from ..arith import NEG_INFINITY, ArgumentError, NegInfinity

Poly = tuple  # of ints, highest degree first


def _norm(f) -> Poly:
    f = [int(c) for c in f]
    while f and f[0] == 0:
        f.pop(0)
    return tuple(f)


def t_poly(coeffs_low_first: Sequence[int], p: int) -> Poly:
    """Polynomial in t from constant-first integer coefficients."""
    return _norm([c % p for c in reversed(list(coeffs_low_first))])


def t_poly_low_first(f: Poly) -> list[int]:
    return list(reversed(f))


@dataclass(frozen=True)
class FFRat:
    """num/den in F_p(t), reduced with monic denominator."""

    num: Poly
    den: Poly
    p: int

    @classmethod
    def make(cls, num, den, p: int) -> "FFRat":
        num, den = _norm(num), _norm(den)
        if not den:
            raise ZeroDivisionError("zero denominator in F_p(t)")
        if not num:
            return cls((), (1,), p)
        g = _norm(gf_gcd(list(num), list(den), p, ZZ))
        if g != (1,):
            num = _norm(gf_quo(list(num), list(g), p, ZZ))
            den = _norm(gf_quo(list(den), list(g), p, ZZ))
        lc, den_m = gf_monic(list(den), p, ZZ)
        inv = pow(int(lc), -1, p)
        num = _norm([c * inv % p for c in num])
        return cls(num, _norm(den_m), p)

    @classmethod
    def const(cls, c: int, p: int) -> "FFRat":
        return cls.make((c % p,), (1,), p)

    @classmethod
    def from_json(cls, obj, p: int) -> "FFRat":
        """``[c0, c1, ...]`` (a polynomial in t) or ``[[num...], [den...]]`` / ``[[num...]]``."""
        if isinstance(obj, list) and all(isinstance(c, int) for c in obj):
            return cls.make(t_poly(obj, p), (1,), p)
        if isinstance(obj, list) and 1 <= len(obj) <= 2 and all(
                isinstance(part, list) and all(isinstance(c, int) for c in part) for part in obj):
            den = t_poly(obj[1], p) if len(obj) == 2 else (1,)
            return cls.make(t_poly(obj[0], p), den, p)
        raise ArgumentError(f"malformed F_p(t) element {obj!r}")

    def to_json(self):
        if self.den == (1,):
            return t_poly_low_first(self.num) or [0]
        return [t_poly_low_first(self.num) or [0], t_poly_low_first(self.den)]

    # field operations ------------------------------------------------------------

    def _coerce(self, other) -> "FFRat":
        if isinstance(other, FFRat):
            if other.p != self.p:
                raise ArgumentError("mixed characteristics")
            return other
        if isinstance(other, int):
            return FFRat.const(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        num = gf_add(gf_mul(list(self.num), list(o.den), p, ZZ), gf_mul(list(o.num), list(self.den), p, ZZ), p, ZZ)
        return FFRat.make(num, gf_mul(list(self.den), list(o.den), p, ZZ), p)

    __radd__ = __add__

    def __neg__(self):
        return FFRat(_norm(gf_neg(list(self.num), self.p, ZZ)), self.den, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return FFRat.make(gf_mul(list(self.num), list(o.num), p, ZZ), gf_mul(list(self.den), list(o.den), p, ZZ), p)

    __rmul__ = __mul__

    def inverse(self) -> "FFRat":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in F_p(t)")
        return FFRat.make(self.den, self.num, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = FFRat.const(1, self.p), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = FFRat.const(other, self.p)
        if not isinstance(other, FFRat):
            return NotImplemented
        return (self.num, self.den, self.p) == (other.num, other.den, other.p)

    def __hash__(self):
        return hash((self.num, self.den, self.p))

    # shape --------------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_constant(self) -> bool:
        return len(self.num) <= 1 and self.den == (1,)

    @property
    def size_bits(self) -> int:
        return len(self.num) + len(self.den)

    def __str__(self):
        def fmt(f):
            terms = []
            n = len(f) - 1
            for i, c in enumerate(f):
                e = n - i
                if c == 0:
                    continue
                mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
                coef = str(c) if (c != 1 or e == 0) else ""
                terms.append(coef + ("*" if coef and mono else "") + mono)
            return " + ".join(terms) or "0"

        if self.den == (1,):
            return fmt(self.num)
        return f"({fmt(self.num)})/({fmt(self.den)})"


@dataclass(frozen=True)
class FFPlace:
    """``pi=None`` is the degree valuation at infinity; otherwise pi is monic irreducible."""

    p: int
    pi: Poly | None = None

    def __post_init__(self):
        if self.pi is not None:
            pi = _norm(self.pi)
            if len(pi) < 2 or pi[0] != 1 or not gf_irreducible_p(list(pi), self.p, ZZ):
                raise ArgumentError(f"{pi} is not monic irreducible over F_{self.p}")
            object.__setattr__(self, "pi", pi)

    @property
    def is_infinity(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else len(self.pi) - 1

    def sort_key(self):
        return (0, ()) if self.pi is None else (1, (len(self.pi), self.pi))

    def __str__(self):
        if self.pi is None:
            return "Infinity"
        return f"Finite({FFRat(self.pi, (1,), self.p)})"


def infinity(p: int) -> FFPlace:
    return FFPlace(p)


def _ord(f: Poly, pi: Poly, p: int) -> int:
    n = 0
    f = list(f)
    while True:
        q, r = gf_div(f, list(pi), p, ZZ)
        if _norm(r):
            return n
        f = q
        n += 1


def ff_abs_log(x: FFRat, v: FFPlace) -> Fraction | NegInfinity:
    """log|x|_v in units of log p."""
    if x.is_zero:
        return NEG_INFINITY
    if v.is_infinity:
        return Fraction(len(x.num) - len(x.den))
    o = _ord(x.num, v.pi, x.p) - _ord(x.den, v.pi, x.p)
    return Fraction(-o * v.degree)


def ff_valuation(x: FFRat, v: FFPlace) -> Fraction | None:
    """-ff_abs_log, or None for zero (Newton polygon convention)."""
    s = ff_abs_log(x, v)
    return None if isinstance(s, NegInfinity) else -s


def irreducible_factors(f: Poly, p: int) -> list[Poly]:
    if len(f) <= 1:
        return []
    _, facs = gf_factor(list(f), p, ZZ)
    return sorted({_norm(fac) for fac, _ in facs}, key=lambda g: (len(g), g))


def support_places(xs: Sequence[FFRat], p: int) -> list[FFPlace]:
    """Infinity, then every finite place where some x has a zero or pole, by (degree, pi)."""
    pis: set[Poly] = set()
    for x in xs:
        if x.is_zero:
            continue
        pis.update(irreducible_factors(x.num, p))
        pis.update(irreducible_factors(x.den, p))
    return [infinity(p)] + [FFPlace(p, pi) for pi in sorted(pis, key=lambda g: (len(g), g))]


def product_formula_sum(x: FFRat) -> Fraction:
    """sum over all places of ff_abs_log(x, v); zero for every nonzero x."""
    if x.is_zero:
        raise ArgumentError("product formula needs x != 0")
    return sum((ff_abs_log(x, v) for v in support_places([x], x.p)), Fraction(0))
