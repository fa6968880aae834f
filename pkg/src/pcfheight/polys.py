"""Monic polynomials over Q, maps of the form g(z^d), critical and branch data.

Dense coefficient lists are stored constant term first.  The helpers prefixed
``p_`` are written against the field operators only, so they work unchanged
for ``Fraction`` and for the rational-function field in ``pcfheight.charp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath

from . import interval as ivl
from .arith import (
    INF,
    ArchInterval,
    ArgumentError,
    ExactNonArch,
    LogSize,
    NEG_INFINITY,
    NegInfinity,
    Place,
    format_rational,
    height,
    valuation,
)

# -- generic dense polynomials ------------------------------------------------


def p_trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def p_deg(a: Sequence) -> int:
    return len(p_trim(a)) - 1


def p_add(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    zero = (a[0] if a else b[0]) * 0
    out = [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)]
    return p_trim(out)


def p_neg(a: Sequence) -> list:
    return [-c for c in a]


def p_sub(a: Sequence, b: Sequence) -> list:
    return p_add(a, p_neg(b)) if b else p_trim(a)


def p_mul(a: Sequence, b: Sequence) -> list:
    a, b = p_trim(a), p_trim(b)
    if not a or not b:
        return []
    zero = a[0] * 0
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return p_trim(out)


def p_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a, b = p_trim(a), p_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    lead = b[-1]
    rem = list(a)
    quot = [a[0] * 0] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        q = rem[k + len(b) - 1] / lead
        quot[k] = q
        if q != 0:
            for j, y in enumerate(b):
                rem[k + j] = rem[k + j] - q * y
    return p_trim(quot), p_trim(rem[: len(b) - 1])


def p_monic(a: Sequence) -> list:
    a = p_trim(a)
    lead = a[-1]
    return [c / lead for c in a]


def p_gcd(a: Sequence, b: Sequence) -> list:
    a, b = p_trim(a), p_trim(b)
    while b:
        a, b = b, p_divmod(a, b)[1]
    return p_monic(a) if a else []


def p_deriv(a: Sequence) -> list:
    return p_trim([a[i] * i for i in range(1, len(a))])


def p_eval(a: Sequence, x):
    acc = x * 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def p_squarefree(a: Sequence) -> list:
    """Monic squarefree part a / gcd(a, a')."""
    a = p_trim(a)
    da = p_deriv(a)
    if not da:
        return p_monic(a)
    g = p_gcd(a, da)
    return p_monic(p_divmod(a, g)[0])


def resultant(a: Sequence, b: Sequence):
    """Res(a, b) over a field by the Euclidean remainder sequence."""
    a, b = p_trim(list(a)), p_trim(list(b))
    if not a or not b:
        raise ArgumentError("resultant of the zero polynomial")
    if isinstance(a[-1], int):
        a, b = [Fraction(c) for c in a], [Fraction(c) for c in b]
    one = a[-1] / a[-1]
    res = one
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            return res * b[0] ** da
        if da == 0:
            return res * a[0] ** db
        r = p_divmod(a, b)[1]
        if not r:
            return one * 0
        dr = len(r) - 1
        if (da * db) % 2:
            res = -res
        res = res * b[-1] ** (da - dr)
        a, b = b, r


def interpolate(xs: Sequence, ys: Sequence) -> list:
    """Lagrange interpolation through ``(xs[i], ys[i])`` over a field."""
    zero = ys[0] * 0
    out: list = [zero] * len(xs)
    for i, xi in enumerate(xs):
        basis = [zero + 1]
        denom = zero + 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = p_mul(basis, [-xj, zero + 1])
                denom = denom * (xi - xj)
        scale = ys[i] / denom
        for k, c in enumerate(basis):
            out[k] = out[k] + c * scale
    return p_trim(out)


def compose_dense(a: Sequence, d: int) -> list:
    """Coefficients of a(z^d)."""
    zero = a[0] * 0
    out = [zero] * ((len(a) - 1) * d + 1)
    for i, c in enumerate(a):
        out[i * d] = c
    return out


def branch_polynomial(g_dense: Sequence) -> list:
    """R(y) = Res_z(g'(z), y - g(z)) = lead(g')^m * prod_j (y - g(c_j)).

    Computed by interpolation at y = 0, 1, ..., m-1.  Integer input is read
    as rational; other coefficient types must be field elements.
    """
    g_dense = p_trim([Fraction(c) if isinstance(c, int) else c for c in g_dense])
    m = len(g_dense) - 1
    dg = p_deriv(g_dense)
    if len(dg) <= 1:
        return [dg[0] ** m] if dg else []
    zero = g_dense[0] * 0
    ys = [zero + k for k in range(m)]
    vals = [resultant(dg, p_sub([y], g_dense)) for y in ys]
    out = interpolate(ys, vals)
    if len(out) != m:
        raise ArithmeticError("branch polynomial has wrong degree")
    return out


# -- Newton polygons -----------------------------------------------------------


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of ``(i, v(coefficient_i))``.

    ``slopes`` are the geometric slopes of the hull in traversal order (so
    nondecreasing), with horizontal lengths as multiplicities.  A root of
    valuation ``-s`` belongs to each segment of slope ``s``.  Roots equal to
    zero (coefficients vanishing below ``zero_roots``) are counted separately.
    """

    vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[tuple[Fraction, int], ...]
    zero_roots: int = 0

    @property
    def degree(self) -> int:
        return self.zero_roots + sum(mult for _, mult in self.slopes)

    @property
    def root_valuations(self) -> list[tuple[Fraction, int]]:
        return [(-s, mult) for s, mult in self.slopes]

    @property
    def max_slope(self) -> Fraction | None:
        """Largest root size in units of log p; ``None`` when every root is 0."""
        return self.slopes[-1][0] if self.slopes else None

    def slope_multiset(self) -> list[Fraction]:
        out = []
        for s, mult in self.slopes:
            out.extend([s] * mult)
        return sorted(out)


def newton_polygon_from_valuations(vals: Sequence) -> NewtonPolygon:
    """Newton polygon from per-degree valuations (``None`` marks a zero coefficient)."""
    pts = [(i, Fraction(v)) for i, v in enumerate(vals) if v is not None]
    if not pts or pts[-1][0] != len(vals) - 1:
        raise ArgumentError("leading coefficient must be nonzero")
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.append((Fraction(y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(hull), tuple(slopes), zero_roots=pts[0][0])


def newton_polygon(coeffs: Sequence, v: Place) -> NewtonPolygon:
    """Newton polygon of a polynomial over Q (constant term first) at a prime."""
    if v.is_archimedean:
        raise ArgumentError("Newton polygons need a prime place")
    coeffs = [Fraction(c) for c in coeffs]
    if not any(coeffs):
        raise ArgumentError("zero polynomial")
    vals = [None if c == 0 else valuation(c, v.prime) for c in coeffs]
    return newton_polygon_from_valuations(vals)


# -- monic polynomials and composed maps ---------------------------------------


@dataclass(frozen=True)
class MonicPoly:
    """z^m + sum coefficients[i] z^i, constant term first, leading 1 implicit."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))
        if len(self.coefficients) < 1:
            raise ArgumentError("monic polynomial needs degree >= 1")

    @classmethod
    def from_roots(cls, roots: Sequence) -> "MonicPoly":
        dense = [Fraction(1)]
        for r in roots:
            dense = p_mul(dense, [-Fraction(r), Fraction(1)])
        return cls(tuple(dense[:-1]))

    @classmethod
    def from_dense(cls, dense: Sequence) -> "MonicPoly":
        dense = p_trim([Fraction(c) for c in dense])
        if dense[-1] != 1:
            raise ArgumentError("polynomial is not monic")
        return cls(tuple(dense[:-1]))

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    m = degree

    @property
    def dense(self) -> list[Fraction]:
        return list(self.coefficients) + [Fraction(1)]

    def __call__(self, x):
        return p_eval(self.dense, x)

    def __str__(self):
        terms = []
        for i, c in reversed(list(enumerate(self.dense))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if c == 1 and mono:
                terms.append(mono)
            elif c == -1 and mono:
                terms.append("-" + mono)
            else:
                terms.append(format_rational(c) + ("*" + mono if mono else ""))
        return " + ".join(terms).replace("+ -", "- ")


def compose_power(g: MonicPoly, d: int) -> MonicPoly:
    """The monic polynomial g(z^d)."""
    if d < 1:
        raise ArgumentError("d must be >= 1")
    return MonicPoly.from_dense(compose_dense(g.dense, d))


def derivative(f: MonicPoly) -> list[Fraction]:
    return p_deriv(f.dense)


@dataclass(frozen=True)
class ComposedMap:
    """The map f(z) = g(z^d) of degree D = d*m."""

    g: MonicPoly
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ArgumentError("d must be >= 1")
        if self.d * self.g.degree < 2:
            raise ArgumentError("total degree d*m must be >= 2")

    @property
    def m(self) -> int:
        return self.g.degree

    @property
    def D(self) -> int:
        return self.d * self.g.degree

    @cached_property
    def f(self) -> MonicPoly:
        return compose_power(self.g, self.d)

    @cached_property
    def _int_model(self) -> tuple[list[int], int]:
        dense = self.g.dense
        den = math.lcm(*(c.denominator for c in dense))
        return [int(c * den) for c in dense], den

    def __call__(self, x: Fraction) -> Fraction:
        """Exact f(x) for rational x (single gcd reduction at the end)."""
        x = Fraction(x)
        nums, L = self._int_model
        n, q = x.numerator ** self.d, x.denominator ** self.d
        # homogeneous Horner: sum c_i n^i q^(m-i)
        acc = nums[-1]
        qpow = q
        for c in reversed(nums[:-1]):
            acc = acc * n + c * qpow
            qpow *= q
        return Fraction(acc, L * q ** (len(nums) - 1))

    def __str__(self):
        return f"g(z^{self.d}) with g = {self.g}"


# -- rational roots -------------------------------------------------------------


def rational_roots(coeffs: Sequence) -> list[Fraction]:
    """All rational roots, with multiplicity, of a nonzero polynomial over Q."""
    coeffs = p_trim([Fraction(c) for c in coeffs])
    if not coeffs:
        raise ArgumentError("zero polynomial has every root")
    if len(coeffs) == 1:
        return []
    from sympy import Poly, QQ, Symbol

    x = Symbol("x")
    poly = Poly(list(reversed(coeffs)), x, domain=QQ)
    out = []
    for fac, mult in poly.factor_list()[1]:
        if fac.degree() == 1:
            a1, a0 = fac.all_coeffs()
            r = -Fraction(int(a0.p), int(a0.q)) / Fraction(int(a1.p), int(a1.q))
            out.extend([r] * mult)
    return sorted(out)


def strip_roots(coeffs: Sequence, roots: Sequence) -> list:
    """Exact quotient of a polynomial by prod (z - r) over the given roots."""
    out = p_trim(list(coeffs))
    for r in roots:
        q, rem = p_divmod(out, [-r, r * 0 + 1])
        if rem:
            raise ArithmeticError(f"{r} is not a root")
        out = q
    return out


# -- archimedean root enclosures -------------------------------------------------


@dataclass(frozen=True)
class RootDisk:
    """A disk |z - center| <= radius known to contain exactly one root."""

    center: mpmath.mpc
    radius: mpmath.mpf
    exact: Fraction | None = None

    def box(self, ctx):
        if self.exact is not None:
            return ctx.mpc(ivl.from_rational(self.exact, ctx), 0)
        return ivl.box(self.center, self.radius, ctx)

    def modulus(self, ctx):
        """Enclosure of |root|."""
        if self.exact is not None:
            return abs(ivl.from_rational(self.exact, ctx))
        c = ctx.mpc(self.center.real, self.center.imag)
        r = ctx.mpf(self.radius)
        mod = ivl.cabs(c, ctx)
        lower = mod - r
        lower_end = ivl.lo(lower)
        return ctx.mpf([max(lower_end, 0), ivl.hi(mod + r)])


def root_disks(coeffs: Sequence, prec: int = ivl.DEFAULT_PREC) -> list[RootDisk]:
    """Validated, pairwise disjoint disks isolating the roots of a squarefree polynomial.

    Centers come from mpmath.polyroots; radii from the Gershgorin disks of
    diag(z_i) - W 1^T, whose characteristic polynomial is the input, with
    Weierstrass corrections W_i = p(z_i) / prod_{j != i} (z_i - z_j).
    """
    coeffs = p_monic([Fraction(c) for c in coeffs])
    n = len(coeffs) - 1
    if n < 1:
        return []
    if n == 1:
        r = -coeffs[0]
        return [RootDisk(mpmath.mpc(mpmath.mpf(r.numerator) / r.denominator), mpmath.mpf(0), r)]
    steps = 100
    for _ in range(6):
        mp = ivl.mpctx(prec)
        ctx = ivl.ivctx(prec)
        try:
            approx = mp.polyroots(
                [mp.mpf(c.numerator) / c.denominator for c in reversed(coeffs)],
                maxsteps=steps, extraprec=prec, cleanup=True,
            )
        except mpmath.libmp.NoConvergence:
            prec *= 2
            steps *= 2
            continue
        if not isinstance(approx, list):
            approx = [approx]
        centers = [ctx.mpc(mp.mpc(z).real, mp.mpc(z).imag) for z in approx]
        icoeffs = [ivl.from_rational(c, ctx) for c in coeffs]
        radii = []
        for i, zi in enumerate(centers):
            val = p_eval(icoeffs, zi)
            den = ctx.mpc(1, 0)
            for j, zj in enumerate(centers):
                if j != i:
                    den = den * (zi - zj)
            w = ivl.cabs(val, ctx) / ivl.cabs(den, ctx) if not ivl.contains_zero(ivl.cabs(den, ctx)) else None
            radii.append(None if w is None else ctx.mpf(n) * w)
        ok = all(r is not None for r in radii)
        if ok:
            for i in range(n):
                for j in range(i + 1, n):
                    gap = ivl.cabs(centers[i] - centers[j], ctx)
                    if not ivl.lo(gap) > ivl.hi(radii[i] + radii[j]):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            return [
                RootDisk(_unrounded(mp.mpc(z)), ivl.hi(r))
                for z, r in zip(approx, radii)
            ]
        prec *= 2
        steps *= 2
    raise ArithmeticError("could not isolate roots")


def _unrounded(z) -> mpmath.mpc:
    return mpmath.mp.make_mpc((z.real._mpf_, z.imag._mpf_))


def _max_modulus(disks: Sequence[RootDisk], ctx):
    mods = [d.modulus(ctx) for d in disks]
    return ctx.mpf([max(ivl.lo(x) for x in mods), max(ivl.hi(x) for x in mods)])


def _log_interval(x, ctx) -> LogSize:
    """LogSize for a nonnegative enclosure of a modulus."""
    if ivl.hi(x) == 0:
        return NEG_INFINITY
    if ivl.lo(x) <= 0:
        return ArchInterval(ivl.NEG_INF, ivl.hi(ctx.log(ctx.mpf(ivl.hi(x)))))
    return ArchInterval.of(ctx.log(x))


def root_sup_log(g: MonicPoly, v: Place, prec: int = ivl.DEFAULT_PREC) -> LogSize:
    """log max_i |a_i|_v over the roots of g."""
    if not v.is_archimedean:
        np_ = newton_polygon(g.dense, v)
        s = np_.max_slope
        return NEG_INFINITY if s is None else ExactNonArch(s, v.prime)
    return poly_root_sup_log_arch(g.dense, prec)


def poly_root_sup_log_arch(coeffs: Sequence, prec: int = ivl.DEFAULT_PREC) -> LogSize:
    sq = p_squarefree([Fraction(c) for c in coeffs])
    if len(sq) == 2 and sq[0] == 0:
        return NEG_INFINITY
    ctx = ivl.ivctx(prec)
    return _log_interval(_max_modulus(root_disks(sq, prec), ctx), ctx)


def poly_root_sup_log(coeffs: Sequence, v: Place) -> LogSize:
    """log of the largest root size of any nonzero polynomial over Q at v."""
    coeffs = p_trim([Fraction(c) for c in coeffs])
    if len(coeffs) == 1:
        return NEG_INFINITY
    if v.is_archimedean:
        return poly_root_sup_log_arch(coeffs)
    s = newton_polygon(coeffs, v).max_slope
    return NEG_INFINITY if s is None else ExactNonArch(s, v.prime)


# -- critical and branch data ------------------------------------------------------


def _rational_dth_roots(c: Fraction, d: int) -> list[Fraction]:
    import gmpy2

    if c == 0:
        return [Fraction(0)]
    sign = -1 if c < 0 else 1
    if sign < 0 and d % 2 == 0:
        return []
    num, exact_n = gmpy2.iroot(abs(c.numerator), d)
    den, exact_d = gmpy2.iroot(c.denominator, d)
    if not (exact_n and exact_d):
        return []
    r = Fraction(sign * int(num), int(den))
    return [r, -r] if d % 2 == 0 else [r]


@dataclass(frozen=True)
class CriticalData:
    """Critical points of f = g(z^d) and the sizes of its branch values.

    ``rational_branch`` pairs each rational critical point ``c_j`` of g (and
    z = 0 when d >= 2) with its exact image; ``irrational_disks`` isolate the
    remaining critical points of g.  ``branch_poly`` is R(y) and
    ``irrational_branch_poly`` its cofactor over the irrational c_j.
    """

    F: ComposedMap
    rational_critical_points: tuple[Fraction, ...]
    all_critical_points_numeric: tuple[complex, ...]
    branch_values_exact: tuple[Fraction, ...]
    rational_branch: tuple[tuple[Fraction, Fraction], ...]
    irrational_disks: tuple[RootDisk, ...]
    branch_poly: tuple[Fraction, ...]
    irrational_branch_poly: tuple[Fraction, ...]
    branch_value_sizes: dict = field(default_factory=dict, compare=False)

    def irrational_branch_boxes(self, ctx):
        g = self.F.g.dense
        icoeffs = [ivl.from_rational(c, ctx) for c in g]
        return [p_eval(icoeffs, disk.box(ctx)) for disk in self.irrational_disks]

    def sizes_at(self, v: Place) -> tuple[LogSize, ...]:
        if v not in self.branch_value_sizes:
            self.branch_value_sizes[v] = _branch_sizes(self, v)
        return self.branch_value_sizes[v]

    def max_size_at(self, v: Place) -> LogSize:
        from .arith import _max_logsize

        return _max_logsize(self.sizes_at(v))

    def irrational_max_size_at(self, v: Place) -> LogSize:
        if len(self.irrational_branch_poly) <= 1:
            return NEG_INFINITY
        if v.is_archimedean:
            ctx = ivl.ivctx()
            boxes = self.irrational_branch_boxes(ctx)
            mods = [ivl.cabs(b, ctx) for b in boxes]
            return _log_interval(ctx.mpf([max(ivl.lo(x) for x in mods), max(ivl.hi(x) for x in mods)]), ctx)
        return poly_root_sup_log(self.irrational_branch_poly, v)


def _branch_sizes(cd: CriticalData, v: Place) -> tuple[LogSize, ...]:
    from .arith import abs_log

    sizes: list[LogSize] = [abs_log(b, v) for b in cd.branch_values_exact]
    if len(cd.irrational_branch_poly) > 1:
        if v.is_archimedean:
            ctx = ivl.ivctx()
            for b in cd.irrational_branch_boxes(ctx):
                sizes.append(_log_interval(ivl.cabs(b, ctx), ctx))
        else:
            np_ = newton_polygon(cd.irrational_branch_poly, v)
            for s, mult in np_.slopes:
                sizes.extend([ExactNonArch(s, v.prime)] * mult)
            sizes.extend([NEG_INFINITY] * np_.zero_roots)
    return tuple(sizes)


def relevant_primes(F: ComposedMap) -> list[int]:
    """Primes where some critical orbit can fail to be v-integral.

    Outside the primes dividing a coefficient denominator of g and the
    primes p <= m, g is p-integral with |m|_p = 1, so every critical point
    and branch value is p-integral and the local Green function vanishes.
    """
    from .arith import support_primes
    from sympy import primerange

    ps = set(support_primes(F.g.coefficients, numerators=False))
    ps.update(primerange(2, F.m + 1))
    return sorted(ps)


def branch_data(F: ComposedMap, places: Sequence[Place] | None = None) -> CriticalData:
    g = F.g
    dg = derivative(g)
    crit_g_rat = rational_roots(dg) if len(dg) > 1 else []
    R = branch_polynomial(g.dense) if g.degree >= 2 else [Fraction(1)]
    rational_branch: list[tuple[Fraction, Fraction]] = []
    seen: set[Fraction] = set()
    if F.d >= 2:
        rational_branch.append((Fraction(0), g(Fraction(0))))
        seen.add(Fraction(0))
    for c in crit_g_rat:
        if c in seen:
            continue
        seen.add(c)
        rational_branch.append((c, g(c)))
    # rational critical points of f itself, with multiplicity
    rat_crit_f: list[Fraction] = []
    if F.d >= 2:
        mult0 = (F.d - 1) + F.d * crit_g_rat.count(Fraction(0))
        rat_crit_f.extend([Fraction(0)] * mult0)
    for c in crit_g_rat:
        if c != 0:
            rat_crit_f.extend(_rational_dth_roots(c, F.d) if F.d > 1 else [c])
    irr_poly = strip_roots(R, [g(c) for c in crit_g_rat]) if len(R) > 1 else R
    disks: list[RootDisk] = []
    if len(dg) > 1:
        rest = p_squarefree(dg)
        rest = strip_roots(rest, sorted(set(crit_g_rat)))
        if len(rest) > 1:
            disks = root_disks(rest)
    numeric: list[complex] = []
    if F.d >= 2:
        numeric.append(0j)
    crit_g_numeric = [complex(c) for c in crit_g_rat] + [complex(dk.center) for dk in disks]
    for c in crit_g_numeric:
        if F.d == 1:
            numeric.append(c)
        elif c != 0:
            r = abs(c) ** (1.0 / F.d)
            phase = math.atan2(c.imag, c.real)
            for k in range(F.d):
                ang = (phase + 2 * math.pi * k) / F.d
                numeric.append(complex(r * math.cos(ang), r * math.sin(ang)))
    branch_exact = []
    for _, b in rational_branch:
        if b not in branch_exact:
            branch_exact.append(b)
    cd = CriticalData(
        F=F,
        rational_critical_points=tuple(sorted(rat_crit_f)),
        all_critical_points_numeric=tuple(numeric),
        branch_values_exact=tuple(branch_exact),
        rational_branch=tuple(rational_branch),
        irrational_disks=tuple(disks),
        branch_poly=tuple(R),
        irrational_branch_poly=tuple(irr_poly),
    )
    for v in places or ([INF] + [Place(p) for p in relevant_primes(F)]):
        cd.sizes_at(v)
    return cd


# -- roots versus critical points ---------------------------------------------------


def c1_constant(m: int, ctx=None):
    """Archimedean gap constant: -log(2^(1/m) - 1), as an interval.

    Critical points lie in the convex hull of the roots (Gauss-Lucas), and
    |g(0)| <= ||a||^m, so log max(||c||, |g(0)|^(1/m)) <= log ||a||.  In the
    other direction each root a satisfies |a|^m <= (|a| + B)^m - |a|^m with
    B = max(||c||, |g(0)|^(1/m)), because the coefficient of z^(m-i) in g is
    binom(m, i)/binom(m-1, i) times a symmetric function of the c_j.  Hence
    |a| <= B / (2^(1/m) - 1).
    """
    ctx = ctx or ivl.ivctx()
    return -ctx.log(ctx.mpf(2) ** (ctx.mpf(1) / m) - 1)


def c1_nonarch(m: int, p: int) -> Fraction:
    """Gap constant at a prime, in units of log p (zero when p > m)."""
    from .arith import _vp

    bound = Fraction(_vp(m, p)) if m % p == 0 else Fraction(0)
    for i in range(1, m):
        v = _vp(m, p) - _vp(m - i, p)
        bound = max(bound, Fraction(-v, i))
    return bound


def lemma1_gap(g: MonicPoly, v: Place) -> LogSize:
    """| log||a||_v - log max(||c||_v, |g(0)|_v^(1/m)) |."""
    m = g.degree
    if m < 2:
        raise ArgumentError("lemma1_gap needs m >= 2")
    if not v.is_archimedean and v.prime <= m:
        raise ArgumentError(f"unsupported place p={v.prime} <= m={m}")
    dg = derivative(g)
    g0 = g.coefficients[0]
    if v.is_archimedean:
        ctx = ivl.ivctx()
        a = root_sup_log(g, v)
        c = poly_root_sup_log_arch(dg)
        parts = [c]
        if g0 != 0:
            parts.append(ArchInterval.of(ivl.log_abs_rational(g0, ctx) / m))
        from .arith import _max_logsize

        b = _max_logsize(parts)
        if isinstance(a, NegInfinity) and isinstance(b, NegInfinity):
            return ArchInterval(mpmath.mpf(0), mpmath.mpf(0))
        if isinstance(a, NegInfinity) or isinstance(b, NegInfinity):
            raise ArithmeticError("root sizes inconsistent")
        return ArchInterval.of(abs(a.enclosure(ctx) - b.enclosure(ctx)))
    p = v.prime
    a = newton_polygon(g.dense, v).max_slope
    c = newton_polygon(dg, v).max_slope if len(dg) > 1 else None
    cands = [x for x in (c, None if g0 == 0 else Fraction(-valuation(g0, p), m)) if x is not None]
    b = max(cands) if cands else None
    if a is None and b is None:
        return ExactNonArch(Fraction(0), p)
    return ExactNonArch(abs(a - b), p)


# -- coefficient vs root height ---------------------------------------------------


def height_top(xs: Sequence) -> int:
    """The integer N with h(xs) = log N."""
    xs = [Fraction(x) for x in xs]
    lcm = math.lcm(*(x.denominator for x in xs))
    return max([lcm] + [abs(x.numerator) * (lcm // x.denominator) for x in xs])


def coeff_height_bound_check(g: MonicPoly):
    """(h(g), h(a), h(g) <= m (h(a) + log 2)) for g split over Q; exact comparison."""
    roots = rational_roots(g.dense)
    if len(roots) != g.degree:
        raise ArgumentError("g must split over Q")
    h_g = height(g.coefficients)
    h_a = height(roots)
    holds = height_top(g.coefficients) <= (2 * height_top(roots)) ** g.degree
    return h_g, h_a, holds
