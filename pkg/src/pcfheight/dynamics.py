"""Orbits, escape certificates, local Green functions and the critical height.

For f = g(z^d) of degree D = d*m, the escape threshold at a place v is
``T_v = log^+ ||a||_v`` (plus ``m/(m-1) log 2`` at infinity), where the a_i
are the roots of g, and ``d log|z|_v > T_v`` puts z in the basin where
``G(z) = log|z| + eps`` with eps = 0 at primes and

    -m/(D-1) log 2 <= eps <= m/(D-1) log(3/2)

at infinity.  When m = 1 the classical monic constants are used instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import mpmath

from . import interval as ivl
from .arith import (
    INF,
    ArchInterval,
    ExactNonArch,
    HeightValue,
    LogSize,
    Place,
    format_rational,
    log_plus,
    relevant_places,
    valuation,
)
from .polys import (
    ComposedMap,
    CriticalData,
    branch_data,
    p_eval,
    relevant_primes,
    root_sup_log,
)

DEFAULT_CAP = 10_000
DEFAULT_TOL = 1e-9
# exact rational iteration stops once numerator+denominator exceed this many bits
EXACT_BITS = 1 << 16


# -- result types ---------------------------------------------------------------


@dataclass(frozen=True)
class Preperiodic:
    tail_length: int
    period: int
    orbit: tuple[Fraction, ...]


@dataclass(frozen=True)
class Escaping:
    place: Place
    escape_index: int
    witness: Fraction


@dataclass(frozen=True)
class Capped:
    iterations: int


OrbitResult = Union[Preperiodic, Escaping, Capped]


class ZeroReason(str, enum.Enum):
    PREPERIODIC_ORBIT = "PreperiodicOrbit"
    INTEGRAL_BOUNDED = "IntegralBounded"


@dataclass(frozen=True)
class ZeroCertified:
    reason: ZeroReason


@dataclass(frozen=True)
class Undetermined:
    """No certificate within the cap; ``upper`` is a valid upper bound when known."""

    iteration_cap: int
    upper: mpmath.mpf | None = None
    diagnostic: str = ""


GreenValue = Union[ExactNonArch, ZeroCertified, ArchInterval, Undetermined]


def green_bounds(gv: GreenValue) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Certified (lower, upper) for a Green value; upper may be +inf."""
    if isinstance(gv, ZeroCertified):
        return mpmath.mpf(0), mpmath.mpf(0)
    if isinstance(gv, ExactNonArch):
        return gv.lower(), gv.upper()
    if isinstance(gv, ArchInterval):
        return gv.lo, gv.hi
    return mpmath.mpf(0), (ivl.POS_INF if gv.upper is None else gv.upper)


def green_to_json(gv: GreenValue) -> dict:
    lo_, hi_ = green_bounds(gv)
    out = {"lower": ivl.down(lo_), "upper": None if hi_ == ivl.POS_INF else ivl.up(hi_)}
    if isinstance(gv, ZeroCertified):
        out.update(kind="ZeroCertified", reason=gv.reason.value)
    elif isinstance(gv, ExactNonArch):
        out.update(kind="ExactNonArch", coeff=format_rational(gv.coeff), p=gv.p)
    elif isinstance(gv, ArchInterval):
        out.update(kind="ArchInterval")
    else:
        out.update(kind="Undetermined", iteration_cap=gv.iteration_cap, diagnostic=gv.diagnostic)
    if out["upper"] is not None:
        mid = (out["lower"] + out["upper"]) / 2
        out.update(value=mid, error=max(out["upper"] - mid, mid - out["lower"]))
    return out


def orbit_to_json(res: OrbitResult) -> dict:
    if isinstance(res, Preperiodic):
        return {"kind": "Preperiodic", "tail_length": res.tail_length, "period": res.period,
                "orbit": [format_rational(x) for x in res.orbit]}
    if isinstance(res, Escaping):
        return {"kind": "Escaping", "place": str(res.place), "escape_index": res.escape_index,
                "witness": None if res.witness is None else format_rational(res.witness)}
    return {"kind": "Capped", "iterations": res.iterations}


# -- escape thresholds ------------------------------------------------------------


def escape_threshold(F: ComposedMap, v: Place) -> LogSize:
    """T_v with d log|z|_v > T_v certifying escape at v."""
    if not v.is_archimedean:
        return log_plus(root_sup_log(F.g, v), v)
    ctx = ivl.ivctx()
    if F.m == 1:
        c = abs(F.g.coefficients[0])
        return ArchInterval.of(F.d * ivl.log_abs_rational(1 + max(Fraction(1), c), ctx))
    a = log_plus(root_sup_log(F.g, v)).enclosure(ctx)
    return ArchInterval.of(a + ctx.mpf(F.m) / (F.m - 1) * ctx.log(ctx.mpf(2)))


@dataclass
class _ArchTail:
    """Archimedean basin data: log-radius ``rho`` and the eps bracket."""

    rho: object
    eps_lo: object
    eps_hi: object


def _arch_tail(F: ComposedMap, ctx) -> _ArchTail:
    two = ctx.mpf(2)
    if F.m == 1:
        c = abs(F.g.coefficients[0])
        rho = ivl.log_abs_rational(2 * max(Fraction(1), c), ctx)
        e = ctx.log(two) / (F.D - 1)
        return _ArchTail(rho, -e, e)
    T = escape_threshold(F, INF).enclosure(ctx)
    k = ctx.mpf(F.m) / (F.D - 1)
    return _ArchTail(T / F.d, -k * ctx.log(two), k * ctx.log(ctx.mpf(3) / 2))


class _EscapeTest:
    def __init__(self, F: ComposedMap, v: Place):
        self.F = F
        self.place = v
        self.T = escape_threshold(F, v)
        if v.is_archimedean and F.m == 1:
            self.radius = 1 + max(Fraction(1), abs(F.g.coefficients[0]))

    def escapes(self, z: Fraction) -> bool:
        if z == 0:
            return False
        if not self.place.is_archimedean:
            return self.F.d * -valuation(z, self.place.prime) > self.T.coeff
        if self.F.m == 1:
            return abs(z) > self.radius
        ctx = ivl.ivctx()
        return ivl.lo(self.F.d * ivl.log_abs_rational(z, ctx)) > self.T.hi


def _bits(z: Fraction) -> int:
    return z.numerator.bit_length() + z.denominator.bit_length()


def orbit(F: ComposedMap, z0, cap: int = DEFAULT_CAP) -> OrbitResult:
    """Iterate f exactly from z0 until a revisit, an escape certificate, or the cap."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    z = Fraction(z0)
    tests = [_EscapeTest(F, v) for v in relevant_places(list(F.g.coefficients) + [z])]
    seen: dict[Fraction, int] = {}
    path: list[Fraction] = []
    for k in range(cap):
        if z in seen:
            return Preperiodic(seen[z], k - seen[z], tuple(path))
        seen[z] = k
        path.append(z)
        for t in tests:
            if t.escapes(z):
                return Escaping(t.place, k, z)
        if _bits(z) > EXACT_BITS:
            return Capped(k + 1)
        z = F(z)
    return Capped(cap)


# -- Green functions ----------------------------------------------------------------


def _integral_at(xs, p: int) -> bool:
    return all(Fraction(x).denominator % p for x in xs)


def green_nonarch(F: ComposedMap, z0, p: int, cap: int = DEFAULT_CAP) -> GreenValue:
    """G_{f,p}(z0) for rational z0, exact once the orbit reaches the basin."""
    z = Fraction(z0)
    coeffs_integral = _integral_at(F.g.coefficients, p)
    T = escape_threshold(F, Place(p)).coeff
    seen: set[Fraction] = set()
    for k in range(cap + 1):
        if coeffs_integral and z.denominator % p:
            return ZeroCertified(ZeroReason.INTEGRAL_BOUNDED)
        if z != 0:
            size = -valuation(z, p)
            if F.d * size > T:
                return ExactNonArch(Fraction(size, F.D ** k), p)
        if z in seen:
            return ZeroCertified(ZeroReason.PREPERIODIC_ORBIT)
        seen.add(z)
        if k == cap or _bits(z) > EXACT_BITS:
            break
        z = F(z)
    # outside the basin G <= T/d, and G(z0) = G(z_k) / D^k
    ctx = ivl.ivctx()
    upper = ivl.from_rational(T, ctx) * ctx.log(ctx.mpf(p)) / (ctx.mpf(F.d) * ctx.mpf(F.D) ** k)
    return Undetermined(cap, ivl.hi(upper), f"no basin entry at p={p} within {k} steps")


def _apply_interval(F: ComposedMap, z, icoeffs, ctx):
    w = z
    for _ in range(F.d - 1):
        w = w * z
    return p_eval(icoeffs, w)


def _as_box(z0, ctx):
    if isinstance(z0, (Fraction, int)):
        return ctx.mpc(ivl.from_rational(z0, ctx), 0)
    if isinstance(z0, complex):
        return ctx.mpc(z0.real, z0.imag)
    if isinstance(z0, tuple):
        re, im = z0
        return ctx.mpc(ivl.from_rational(re, ctx), ivl.from_rational(im, ctx))
    if isinstance(z0, ctx.mpc):
        return z0
    # an mpmath interval from another context
    return ctx.mpc(ctx.mpf([z0.real.a, z0.real.b]), ctx.mpf([z0.imag.a, z0.imag.b]))


def green_arch(F: ComposedMap, z0, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP,
               prec: int = ivl.DEFAULT_PREC) -> GreenValue:
    """G_{f,inf}(z0) as a certified interval.

    ``z0`` may be a rational (iterated exactly while small, so preperiodic
    orbits are recognised), a complex float, a pair of rationals (re, im), or
    a complex interval.  Once iterate k lies in the basin, every later
    iterate j gives the enclosure (log|z_j| + eps) / D^j; these are
    intersected until the width drops below ``tol`` or j reaches ``cap``.
    """
    while True:
        res = _green_arch_once(F, z0, tol, cap, prec)
        if not isinstance(res, Undetermined) or "blow-up" not in res.diagnostic or prec >= 2560:
            return res
        prec *= 4


def _green_arch_once(F, z0, tol, cap, prec) -> GreenValue:
    ctx = ivl.ivctx(prec)
    tail = _arch_tail(F, ctx)
    rho_hi = ivl.hi(tail.rho)
    k = 0
    if isinstance(z0, (Fraction, int)):
        z = Fraction(z0)
        seen: set[Fraction] = set()
        while k < cap:
            if z in seen:
                return ZeroCertified(ZeroReason.PREPERIODIC_ORBIT)
            seen.add(z)
            if z != 0 and ivl.lo(ivl.log_abs_rational(z, ctx)) > rho_hi:
                break
            if _bits(z) > 4096:
                break
            z = F(z)
            k += 1
        # real orbits stay real: plain intervals are tighter and cheaper than boxes
        zi = ivl.from_rational(z, ctx)
    else:
        zi = _as_box(z0, ctx)
    icoeffs = [ivl.from_rational(c, ctx) for c in F.g.dense]
    D = ctx.mpf(F.D)
    best_lo = mpmath.mpf(0)
    best_hi = ivl.POS_INF
    entered = False
    while True:
        mod = ivl.cabs(zi, ctx)
        Dk = D ** k
        if ivl.lo(mod) > 0:
            L = ctx.log(mod)
            if ivl.lo(L) > rho_hi:
                entered = True
                best_lo = max(best_lo, ivl.lo((L + tail.eps_lo) / Dk))
                best_hi = min(best_hi, ivl.hi((L + tail.eps_hi) / Dk))
                if best_hi - best_lo <= tol * 0.5 or ivl.width(ctx.mpf([best_lo, best_hi])) <= tol:
                    break
            elif entered:
                return Undetermined(cap, best_hi, "interval blow-up after basin entry")
            if not entered:
                top = max(ivl.hi(L), rho_hi)
                best_hi = min(best_hi, ivl.hi((ctx.mpf(top) + tail.eps_hi) / Dk))
                if ivl.hi(L) - ivl.lo(L) > 1:
                    return Undetermined(cap, best_hi, f"interval blow-up at step {k}")
        elif not entered:
            best_hi = min(best_hi, ivl.hi((tail.rho + tail.eps_hi) / Dk))
        if k >= cap:
            break
        zi = _apply_interval(F, zi, icoeffs, ctx)
        k += 1
    if entered:
        return ArchInterval(best_lo, best_hi)
    return Undetermined(cap, best_hi, f"no basin entry within {cap} steps")


def arch_escape_index(F: ComposedMap, z0, cap: int = 200) -> int | None:
    """First k with f^k(z0) certified in the archimedean basin, if any."""
    ctx = ivl.ivctx()
    tail = _arch_tail(F, ctx)
    zi = _as_box(z0, ctx)
    icoeffs = [ivl.from_rational(c, ctx) for c in F.g.dense]
    for k in range(cap + 1):
        mod = ivl.cabs(zi, ctx)
        if ivl.lo(mod) > 0 and ivl.lo(ctx.log(mod)) > ivl.hi(tail.rho):
            return k
        if ivl.hi(mod) - ivl.lo(mod) > 1e6:
            return None
        zi = _apply_interval(F, zi, icoeffs, ctx)
    return None


# -- critical lambda and height --------------------------------------------------------


def _combine_max(values: Sequence[GreenValue], cap: int, scale: int) -> GreenValue:
    """max over branch values, divided by ``scale`` (= D)."""
    if all(isinstance(v, ZeroCertified) for v in values):
        if any(v.reason == ZeroReason.PREPERIODIC_ORBIT for v in values):
            return ZeroCertified(ZeroReason.PREPERIODIC_ORBIT)
        return ZeroCertified(ZeroReason.INTEGRAL_BOUNDED)
    exact = [v for v in values if isinstance(v, ExactNonArch)]
    if exact and all(isinstance(v, (ExactNonArch, ZeroCertified)) for v in values):
        top = max(exact, key=lambda v: v.coeff)
        return ExactNonArch(top.coeff / scale, top.p)
    bounds = [green_bounds(v) for v in values]
    ctx = ivl.ivctx()
    lo_ = max(b[0] for b in bounds)
    hi_ = max(b[1] for b in bounds)
    lo_s = ivl.lo(ctx.mpf(lo_) / scale)
    if hi_ == ivl.POS_INF:
        return Undetermined(cap, None, f"branch values undetermined; lower bound {float(lo_s)}")
    return ArchInterval(lo_s, ivl.hi(ctx.mpf(hi_) / scale))


def local_crit_lambda(F: ComposedMap, v: Place, cap: int = DEFAULT_CAP, tol: float = DEFAULT_TOL,
                      cd: CriticalData | None = None) -> GreenValue:
    """lambda_{crit,v}(f) = max over critical c of G(c) = (1/D) max over branch values of G."""
    cd = cd or branch_data(F)
    if v.is_archimedean:
        vals: list[GreenValue] = [green_arch(F, b, tol, cap) for b in cd.branch_values_exact]
        ctx = ivl.ivctx()
        vals += [green_arch(F, bx, tol, cap) for bx in cd.irrational_branch_boxes(ctx)]
        return _combine_max(vals, cap, F.D)
    p = v.prime
    T = escape_threshold(F, v).coeff
    sizes = cd.sizes_at(v)
    finite = [s.coeff for s in sizes if isinstance(s, ExactNonArch)]
    if T == 0 and all(s <= 0 for s in finite):
        return ZeroCertified(ZeroReason.INTEGRAL_BOUNDED)
    if finite and F.d * max(finite) > T:
        # the largest branch value is in the basin, and nothing outside it beats it
        return ExactNonArch(max(finite) / F.D, p)
    vals = [green_nonarch(F, b, p, cap) for b in cd.branch_values_exact]
    if len(cd.irrational_branch_poly) > 1:
        ctx = ivl.ivctx()
        bound = ivl.hi(ivl.from_rational(T, ctx) * ctx.log(ctx.mpf(p)) / F.d)
        vals.append(ArchInterval(mpmath.mpf(0), bound))
    return _combine_max(vals, cap, F.D)


class PcfFlag(str, enum.Enum):
    CERTIFIED_PCF = "CertifiedPCF"
    CERTIFIED_NOT_PCF = "CertifiedNotPCF"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CritHeightReport:
    per_place: dict
    total: HeightValue
    pcf_flag: PcfFlag
    certificate: object = field(default=None, compare=False)

    @property
    def has_undetermined(self) -> bool:
        return any(isinstance(v, Undetermined) for v in self.per_place.values())

    def to_json(self) -> dict:
        total = {"lower": ivl.down(self.total.lo),
                 "upper": None if self.total.hi == ivl.POS_INF else ivl.up(self.total.hi)}
        if total["upper"] is not None:
            total.update(value=self.total.value, error=self.total.error)
        else:
            total.update(value=None, error=None)
        return {
            "per_place": {str(v): green_to_json(g) for v, g in self.per_place.items()},
            "total": total,
            "pcf_flag": self.pcf_flag.value,
        }


def crit_height(F: ComposedMap, cap: int = DEFAULT_CAP, tol: float = DEFAULT_TOL,
                jobs: int = 1) -> CritHeightReport:
    """hat-h_crit(f) = sum over places of lambda_{crit,v}(f), with a PCF verdict.

    Only the archimedean place and :func:`polys.relevant_primes` can
    contribute; every other prime is certified zero by integrality.
    """
    from .pcf import Verdict, certify_pcf

    cd = branch_data(F)
    places = [INF] + [Place(p) for p in relevant_primes(F)]
    cert = certify_pcf(F, cap, cd)
    if cert.verdict == Verdict.PCF:
        per_place = {v: ZeroCertified(ZeroReason.PREPERIODIC_ORBIT) for v in places}
        return CritHeightReport(per_place, HeightValue.exact_zero(), PcfFlag.CERTIFIED_PCF, cert)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            lams = list(pool.map(_lambda_job, [(F, v, cap, tol) for v in places]))
    else:
        lams = [local_crit_lambda(F, v, cap, tol, cd) for v in places]
    per_place = dict(zip(places, lams))
    ctx = ivl.ivctx()
    total_lo = ctx.mpf(0)
    total_hi = ctx.mpf(0)
    unbounded = False
    for g in lams:
        lo_, hi_ = green_bounds(g)
        total_lo = total_lo + ctx.mpf(lo_)
        if hi_ == ivl.POS_INF:
            unbounded = True
        else:
            total_hi = total_hi + ctx.mpf(hi_)
    total = HeightValue(ivl.lo(total_lo), ivl.POS_INF if unbounded else ivl.hi(total_hi))
    if cert.verdict == Verdict.NOT_PCF or total.lo > 0:
        flag = PcfFlag.CERTIFIED_NOT_PCF
    else:
        flag = PcfFlag.INCONCLUSIVE
    return CritHeightReport(per_place, total, flag, cert)


def _lambda_job(args):
    F, v, cap, tol = args
    return local_crit_lambda(F, v, cap, tol)
