"""Families g(z^d) over F_p(t): exact Green functions, the non-constant test,
and postcritical statistics of specializations to F_{p^k}.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from ..arith import ArgumentError, NegInfinity
from ..dynamics import Undetermined, ZeroCertified, ZeroReason
from ..polys import branch_polynomial, compose_dense, newton_polygon_from_valuations, p_deriv
from .ffrat import FFPlace, FFRat, ff_abs_log, ff_valuation, support_places
from .fq import FqField, field

MAX_T_DEGREE = 1 << 14


class HypothesisViolation(ArgumentError):
    """The input lies outside the regime deg(g) < p, d >= 2."""


@dataclass(frozen=True)
class CharPFamily:
    """f = g(z^d) with g monic over F_p(t); ``coefficients`` are below the leading 1."""

    coefficients: tuple[FFRat, ...]
    d: int
    p: int

    def __post_init__(self):
        if self.d < 1:
            raise ArgumentError("d must be >= 1")
        if not self.coefficients:
            raise ArgumentError("g must have degree >= 1")
        if self.D < 2:
            raise ArgumentError("total degree d*deg(g) must be >= 2")
        if any(c.p != self.p for c in self.coefficients):
            raise ArgumentError("coefficients over the wrong prime")

    @classmethod
    def from_json(cls, coeffs: Sequence, d: int, p: int) -> "CharPFamily":
        if not isinstance(coeffs, list) or not coeffs:
            raise ArgumentError("g must be a non-empty JSON array of F_p(t) coefficients")
        return cls(tuple(FFRat.from_json(c, p) for c in coeffs), d, p)

    @property
    def m(self) -> int:
        return len(self.coefficients)

    @property
    def D(self) -> int:
        return self.d * self.m

    @property
    def g_dense(self) -> list[FFRat]:
        return list(self.coefficients) + [FFRat.const(1, self.p)]

    @property
    def f_dense(self) -> list[FFRat]:
        return compose_dense(self.g_dense, self.d)

    def check_hypothesis(self):
        if self.d < 2:
            raise HypothesisViolation(f"d = {self.d}: the family test needs d >= 2")
        if self.m >= self.p:
            raise HypothesisViolation(f"deg(g) = {self.m} >= p = {self.p}: the family test needs deg(g) < p")

    def __call__(self, z: FFRat) -> FFRat:
        w = z ** self.d
        acc = FFRat.const(1, self.p)
        for c in reversed(self.coefficients):
            acc = acc * w + c
        return acc

    def __str__(self):
        terms = [f"z^{self.D}"]
        for i in range(self.m - 1, -1, -1):
            c = self.coefficients[i]
            if not c.is_zero:
                e = i * self.d
                mono = "" if e == 0 else ("z" if e == 1 else f"z^{e}")
                terms.append(f"({c})" + ("*" + mono if mono else ""))
        return " + ".join(terms) + f" over F_{self.p}(t)"


def ff_root_sup_log(coeffs: Sequence[FFRat], v: FFPlace) -> Fraction | NegInfinity:
    """log of the largest root of a polynomial (constant first) at v, via its Newton polygon."""
    np_ = newton_polygon_from_valuations([ff_valuation(c, v) for c in coeffs])
    if np_.max_slope is None:
        from ..arith import NEG_INFINITY

        return NEG_INFINITY
    return np_.max_slope


def ff_log_plus_a(F: CharPFamily, v: FFPlace) -> Fraction:
    s = ff_root_sup_log(F.g_dense, v)
    return Fraction(0) if isinstance(s, NegInfinity) else max(Fraction(0), s)


def _integral(xs: Sequence[FFRat], v: FFPlace) -> bool:
    return all(x.is_zero or ff_abs_log(x, v) <= 0 for x in xs)


def ff_green(F: CharPFamily, z0: FFRat, v: FFPlace, cap: int = 1000):
    """G_{f,v}(z0) in units of log p: a Fraction, ZeroCertified or Undetermined."""
    T = ff_log_plus_a(F, v)
    coeffs_integral = _integral(F.coefficients, v)
    seen: set[FFRat] = set()
    z = z0
    for k in range(cap + 1):
        if coeffs_integral and _integral([z], v):
            return ZeroCertified(ZeroReason.INTEGRAL_BOUNDED)
        if not z.is_zero:
            s = ff_abs_log(z, v)
            if F.d * s > T:
                return s / F.D ** k
        if z in seen:
            return ZeroCertified(ZeroReason.PREPERIODIC_ORBIT)
        seen.add(z)
        if k == cap or z.size_bits > MAX_T_DEGREE:
            break
        z = F(z)
    return Undetermined(cap, None, f"no basin entry at {v} within {k} steps")


@dataclass(frozen=True)
class FFLambda:
    """lambda_crit,v in units of log p: exact when lower == upper."""

    lower: Fraction
    upper: Fraction

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def ff_branch_sizes(F: CharPFamily, v: FFPlace) -> list[Fraction]:
    """Finite sizes at v of the branch values g(0) (d >= 2) and g(c_j)."""
    sizes = []
    if F.d >= 2 and not F.coefficients[0].is_zero:
        sizes.append(ff_abs_log(F.coefficients[0], v))
    if F.m >= 2:
        R = branch_polynomial(F.g_dense)
        np_ = newton_polygon_from_valuations([ff_valuation(c, v) for c in R])
        sizes.extend(s for s, mult in np_.slopes for _ in range(mult))
    return sizes


def ff_crit_lambda(F: CharPFamily, v: FFPlace, cap: int = 1000) -> FFLambda:
    T = ff_log_plus_a(F, v)
    sizes = ff_branch_sizes(F, v)
    if sizes and F.d * max(sizes) > T:
        return FFLambda(max(sizes) / F.D, max(sizes) / F.D)
    if T == 0 and _integral(F.coefficients, v):
        return FFLambda(Fraction(0), Fraction(0))
    # branch values outside the basin have G <= T/d
    lower = Fraction(0)
    if F.d >= 2:
        g0 = ff_green(F, F.coefficients[0], v, cap)
        if isinstance(g0, Fraction):
            lower = g0 / F.D
    return FFLambda(lower, T / (F.d * F.D))


class FamilyVerdict(str, enum.Enum):
    CONSTANT = "ConstantFamilyPCFPossible"
    NOT_PCF = "NotPCF"


@dataclass(frozen=True)
class FamilyTestResult:
    verdict: FamilyVerdict
    witness: FFPlace | None
    bound: Fraction | None
    per_place: dict = dc_field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "units": "log p",
               "per_place": {str(v): str(x) for v, x in self.per_place.items()}}
        if self.witness is not None:
            out.update(witness=str(self.witness), bound=str(self.bound))
        return out


def ff_family_pcf_test(F: CharPFamily) -> FamilyTestResult:
    """Non-constant families are never PCF; the witness place carries the exact lower bound.

    For each place v in the support of the coefficients, log^+||a||_v comes
    from the Newton polygon of g; any positive value gives
    lambda_crit,v >= log^+||a||_v / (d m) with no error term.
    """
    F.check_hypothesis()
    per_place = {v: ff_log_plus_a(F, v) for v in support_places(F.coefficients, F.p)}
    for v, L in per_place.items():
        if L > 0:
            return FamilyTestResult(FamilyVerdict.NOT_PCF, v, L / (F.d * F.m), per_place)
    return FamilyTestResult(FamilyVerdict.CONSTANT, None, None, per_place)


def theorem2_check(F: CharPFamily, cap: int = 1000) -> list[tuple[FFPlace, Fraction, FFLambda, bool]]:
    """(place, log^+||a||_v / (d m), lambda_crit,v, lambda.lower >= bound) at each positive place."""
    F.check_hypothesis()
    out = []
    for v in support_places(F.coefficients, F.p):
        L = ff_log_plus_a(F, v)
        if L > 0:
            bound = L / (F.d * F.m)
            lam = ff_crit_lambda(F, v, cap)
            out.append((v, bound, lam, lam.lower >= bound))
    return out


# -- critical points and postcritical sets over finite fields -------------------------------


class CritStatus(str, enum.Enum):
    SEPARABLE = "Separable"
    NO_AFFINE_CRITICAL = "NoAffineCritical"
    INSEPARABLE = "Inseparable"


@dataclass(frozen=True)
class CriticalSet:
    status: CritStatus
    points: tuple | None
    degree_divisible_by_p: bool

    def to_json(self) -> dict:
        return {"status": self.status.value,
                "points": None if self.points is None else [[c, mult] for c, mult in self.points],
                "degree_divisible_by_p": self.degree_divisible_by_p}


def _fq_deriv(Fq: FqField, coeffs: Sequence[int]) -> list[int]:
    out = [Fq.mul(c, Fq.from_int(i)) for i, c in enumerate(coeffs)][1:]
    while out and out[-1] == 0:
        out.pop()
    return out


def _fq_divide_linear(Fq: FqField, coeffs: list[int], r: int) -> tuple[list[int], int]:
    """Synthetic division by (z - r): quotient and remainder."""
    n = len(coeffs) - 1
    q = [0] * n
    acc = 0
    for i in range(n, -1, -1):
        acc = Fq.add(Fq.mul(acc, r), coeffs[i])
        if i > 0:
            q[i - 1] = acc
    return q, acc


def charp_critical_points(f, Fq: FqField | None = None) -> CriticalSet:
    """Critical points of f (constant-first coefficients), exhaustively over F_q.

    ``f`` is either a list of F_q encodings (with ``Fq`` given) or a list of
    :class:`FFRat`; over F_p(t) only the status is decided (points=None
    when f' is non-constant).
    """
    if Fq is None:
        p = f[-1].p
        deg = len(f) - 1
        df = p_deriv(f)
        if not df:
            return CriticalSet(CritStatus.INSEPARABLE, (), deg % p == 0)
        if len(df) == 1:
            return CriticalSet(CritStatus.NO_AFFINE_CRITICAL, (), deg % p == 0)
        return CriticalSet(CritStatus.SEPARABLE, None, deg % p == 0)
    deg = len(f) - 1
    if deg < 2:
        raise ArgumentError("deg f must be >= 2")
    df = _fq_deriv(Fq, f)
    flag = deg % Fq.p == 0
    if not df:
        return CriticalSet(CritStatus.INSEPARABLE, (), flag)
    if len(df) == 1:
        return CriticalSet(CritStatus.NO_AFFINE_CRITICAL, (), flag)
    return CriticalSet(CritStatus.SEPARABLE, _fq_roots(Fq, tuple(df)), flag)


def _fq_roots(Fq: FqField, df: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    pts = []
    if df[0] == 0:
        candidates = [0] + [x for x in range(1, Fq.q) if Fq.eval_poly(list(df), x) == 0]
    else:
        candidates = [x for x in range(1, Fq.q) if Fq.eval_poly(list(df), x) == 0]
    for r in candidates:
        mult, rest = 0, list(df)
        while len(rest) > 1:
            q, rem = _fq_divide_linear(Fq, rest, r)
            if rem:
                break
            mult += 1
            rest = q
        pts.append((r, mult))
    return tuple(pts)


class Specialization:
    """f_{t0} = g_{t0}(z^d) over F_q, evaluated with log tables."""

    def __init__(self, F: CharPFamily, Fq: FqField, t0: int):
        self.Fq, self.d = Fq, F.d
        g = []
        for c in F.coefficients:
            den = _eval_t(Fq, c.den, t0)
            if den == 0:
                raise ZeroDivisionError("coefficient has a pole at t0")
            g.append(Fq.mul(_eval_t(Fq, c.num, t0), Fq.inv(den)))
        self.g = g + [1]
        self.dense = compose_dense(self.g, F.d)

    def __call__(self, z: int) -> int:
        Fq = self.Fq
        w = 0 if z == 0 else Fq.exp[(Fq.log[z] * self.d) % (Fq.q - 1)]
        acc = 1
        for c in reversed(self.g[:-1]):
            acc = Fq.add(Fq.mul(acc, w), c)
        return acc


def _eval_t(Fq: FqField, poly_high_first: tuple, t0: int) -> int:
    acc = 0
    for c in poly_high_first:
        acc = Fq.add(Fq.mul(acc, t0), Fq.from_int(c))
    return acc


def postcritical_set(f, crit: CriticalSet) -> set[int]:
    """Union of the forward orbits of the critical values f(c)."""
    post: set[int] = set()
    for c, _ in crit.points or ():
        x = f(c)
        while x not in post:
            post.add(x)
            x = f(x)
    return post


def postcritical_size(Fq: FqField, f_coeffs: Sequence[int]) -> int:
    """Exact postcritical size for f given by constant-first F_q coefficients."""
    crit = charp_critical_points(list(f_coeffs), Fq)
    return len(postcritical_set(lambda z: Fq.eval_poly(list(f_coeffs), z), crit))


@dataclass(frozen=True)
class ScanRow:
    k: int
    q: int
    count: int
    max_size: int
    mean_size: float
    sampled: bool
    skipped_poles: int
    no_critical: int


def specialization_scan(F: CharPFamily, k_max: int, budget: int = 100_000, seed: int = 0,
                        skip_zero: bool = False) -> list[ScanRow]:
    """Max and mean postcritical size over t0 in F_{p^k}, k = 1..k_max.

    Parameters are enumerated in encoding order; when p^k exceeds ``budget``
    a uniform sample of ``budget`` parameters is drawn instead (row marked
    ``sampled``).
    """
    if k_max < 1:
        raise ArgumentError("k_max must be >= 1")
    rows = []
    crit_cache: dict = {}
    for k in range(1, k_max + 1):
        Fq = field(F.p, k)
        params = list(range(Fq.q))
        sampled = Fq.q > budget
        if sampled:
            params = sorted(random.Random(seed + k).sample(params, budget))
        if skip_zero:
            params = [t for t in params if t != 0]
        sizes, poles, nocrit = [], 0, 0
        for t0 in params:
            try:
                f = Specialization(F, Fq, t0)
            except ZeroDivisionError:
                poles += 1
                continue
            key = (k, tuple(_fq_deriv(Fq, f.dense)))
            if key not in crit_cache:
                crit_cache[key] = charp_critical_points(f.dense, Fq)
            crit = crit_cache[key]
            if not crit.points:
                nocrit += 1
            sizes.append(len(postcritical_set(f, crit)))
        count = len(sizes)
        rows.append(ScanRow(k, Fq.q, count, max(sizes, default=0),
                            sum(sizes) / count if count else 0.0, sampled, poles, nocrit))
    return rows
