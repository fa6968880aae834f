"""Outward-rounded real and complex intervals on top of mpmath's interval context.

Every archimedean quantity in the package passes through here.  Contexts are
private instances (not the global ``mpmath.iv``) so that precision changes in
one computation never leak into another.
"""

from __future__ import annotations

import functools
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext
from mpmath.ctx_mp import MPContext
from mpmath.libmp import to_float

DEFAULT_PREC = 160


@functools.lru_cache(maxsize=None)
def ivctx(prec: int = DEFAULT_PREC) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


@functools.lru_cache(maxsize=None)
def mpctx(prec: int = DEFAULT_PREC) -> MPContext:
    ctx = MPContext()
    ctx.prec = prec
    return ctx


NEG_INF = mpmath.mpf("-inf")
POS_INF = mpmath.mpf("inf")


def from_rational(x, ctx: MPIntervalContext | None = None):
    """Enclosure of a rational (or int) as a real interval."""
    ctx = ctx or ivctx()
    x = Fraction(x)
    if x.denominator == 1:
        return ctx.mpf(x.numerator)
    return ctx.mpf(x.numerator) / ctx.mpf(x.denominator)


def log_abs_rational(x, ctx: MPIntervalContext | None = None):
    """Enclosure of log|x| for a nonzero rational x."""
    ctx = ctx or ivctx()
    x = Fraction(x)
    if x == 0:
        raise ValueError("log of zero")
    num = abs(x.numerator)
    return ctx.log(ctx.mpf(num)) - ctx.log(ctx.mpf(x.denominator))


def log_int(n: int, ctx: MPIntervalContext | None = None):
    ctx = ctx or ivctx()
    return ctx.log(ctx.mpf(n))


def lo(x) -> mpmath.mpf:
    """Lower endpoint of an mpmath interval as an unrounded mpf.

    Arithmetic on the result runs at the global mpmath precision, so callers
    only compare or convert it; anything else goes back through a context.
    """
    return mpmath.mp.make_mpf(x._mpi_[0])


def hi(x) -> mpmath.mpf:
    return mpmath.mp.make_mpf(x._mpi_[1])


def down(x) -> float:
    """Largest float not above the mpf ``x``."""
    return to_float(_raw(x), rnd="f")


def up(x) -> float:
    return to_float(_raw(x), rnd="c")


def _raw(x):
    # mpmath.mpf(x) would round an existing mpf to the global precision
    if isinstance(x, mpmath.mpf):
        return x._mpf_
    return mpmath.mpf(x)._mpf_


def interval(lo_, hi_, ctx: MPIntervalContext | None = None):
    ctx = ctx or ivctx()
    return ctx.mpf([lo_, hi_])


def cabs(z, ctx: MPIntervalContext):
    """Enclosure of |z| for a complex interval (or real interval) ``z``."""
    if isinstance(z, ctx.mpc):
        # abs first: x * x on an interval straddling 0 is not a square
        re, im = abs(z.real), abs(z.imag)
        return ctx.sqrt(re * re + im * im)
    return abs(z)


def box(center, radius, ctx: MPIntervalContext):
    """Complex interval covering the closed disk of the given center and radius."""
    r = ctx.mpf([-radius, radius])
    c = ctx.mpc(center.real, center.imag) if hasattr(center, "imag") else ctx.mpc(center, 0)
    return c + ctx.mpc(r, r)


def contains_zero(x) -> bool:
    return lo(x) <= 0 <= hi(x)


def width(x) -> float:
    return up(hi(x - x.a))
