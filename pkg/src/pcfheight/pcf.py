"""PCF certification, the unicritical enumeration, and the height experiments.

Constants for the local lower bound
-----------------------------------
The archimedean C3(m) is the maximum of

* (m/(m-1)) C1 + C2/m,
* m/(2m-1) log 2,
* (m C1 + C2 + C4 + log m) / (m-1),

with C2 = m/(m-1) log 2 and C4 the empirical psi-bound estimate plus a
margin of 1.0.  At a prime p <= m the same chain of inequalities runs with
C2 = 0, the p-adic C1 and |log|m|_p| in place of log m; everything is then a
rational multiple of log p.  For p > m all these constants vanish.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import __version__
from . import interval as ivl
from .arith import (
    INF,
    ArgumentError,
    ExactNonArch,
    Place,
    _vp,
    format_rational,
    height,
    log_plus,
)
from .dynamics import (
    Capped,
    Escaping,
    ZeroCertified,
    arch_escape_index,
    crit_height,
    escape_threshold,
    green_bounds,
    local_crit_lambda,
    orbit,
    orbit_to_json,
)
from .polys import (
    ComposedMap,
    CriticalData,
    MonicPoly,
    _rational_dth_roots,
    branch_data,
    branch_polynomial,
    c1_constant,
    c1_nonarch,
    height_top,
    newton_polygon,
    relevant_primes,
    root_disks,
    root_sup_log,
)

RNG_NAME = "MT19937 (Python random.Random)"


class Verdict(str, enum.Enum):
    PCF = "PCF"
    NOT_PCF = "NotPCF"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class BranchEscape:
    """Escape of an irrational branch value, certified from its size alone."""

    place: Place
    escape_index: int


@dataclass(frozen=True)
class PcfCertificate:
    verdict: Verdict
    per_critical_point: tuple
    postcritical_set: tuple[Fraction, ...] | None = None

    def to_json(self) -> dict:
        rows = []
        for desc, res in self.per_critical_point:
            if isinstance(res, BranchEscape):
                rows.append({"point": desc, "result": {"kind": "Escaping", "place": str(res.place),
                                                       "escape_index": res.escape_index}})
            elif res is None:
                rows.append({"point": desc, "result": {"kind": "Unresolved"}})
            else:
                rows.append({"point": desc, "result": orbit_to_json(res)})
        out = {"verdict": self.verdict.value, "per_critical_point": rows}
        if self.postcritical_set is not None:
            out["postcritical_set"] = [format_rational(x) for x in self.postcritical_set]
        return out


def _orbit_start(F: ComposedMap, c: Fraction, beta: Fraction) -> tuple[str, Fraction, bool]:
    """Where to start the orbit for critical data (c, beta).

    Returns (description, start, start_is_critical).  When the critical
    points over c are irrational (z^d = c with no rational root) their common
    image beta is iterated instead.
    """
    if F.d == 1:
        return f"z={format_rational(c)}", c, True
    if c == 0:
        return "z=0", Fraction(0), True
    roots = _rational_dth_roots(c, F.d)
    if roots:
        return f"z={format_rational(roots[0])}", roots[0], True
    return f"z^{F.d}={format_rational(c)} (via image {format_rational(beta)})", beta, False


def certify_pcf(F: ComposedMap, cap: int = 10_000, cd: CriticalData | None = None) -> PcfCertificate:
    """Decide whether every critical orbit of f is finite."""
    cd = cd or branch_data(F)
    entries: list = []
    post: set[Fraction] = set()
    escaped = False
    unresolved = False
    for c, beta in cd.rational_branch:
        desc, start, is_crit = _orbit_start(F, c, beta)
        res = orbit(F, start, cap)
        entries.append((desc, res))
        if isinstance(res, Escaping):
            escaped = True
        elif isinstance(res, Capped):
            unresolved = True
        else:
            post.update(res.orbit[1:] if is_crit else res.orbit)
            if is_crit and res.tail_length == 0:
                post.add(res.orbit[0])
    if len(cd.irrational_branch_poly) > 1:
        desc = "irrational critical points of g"
        hit = _irrational_escape(F, cd)
        entries.append((desc, hit))
        if hit is None:
            unresolved = True
        else:
            escaped = True
    if escaped:
        return PcfCertificate(Verdict.NOT_PCF, tuple(entries))
    if unresolved:
        return PcfCertificate(Verdict.INCONCLUSIVE, tuple(entries))
    return PcfCertificate(Verdict.PCF, tuple(entries), tuple(sorted(post)))


def _irrational_escape(F: ComposedMap, cd: CriticalData) -> BranchEscape | None:
    for p in relevant_primes(F):
        v = Place(p)
        size = cd.irrational_max_size_at(v)
        if isinstance(size, ExactNonArch) and F.d * size.coeff > escape_threshold(F, v).coeff:
            # the branch value is f(c), so the critical point escapes at step 1
            return BranchEscape(v, 1)
    ctx = ivl.ivctx()
    for b in cd.irrational_branch_boxes(ctx):
        k = arch_escape_index(F, b)
        if k is not None:
            return BranchEscape(INF, k + 1)
    return None


# -- unicritical enumeration -----------------------------------------------------------


@dataclass(frozen=True)
class EnumerationRow:
    d: int
    c: Fraction
    pcf: bool
    orbit: tuple[Fraction, ...]
    tail: int | None = None
    period: int | None = None


def unicritical_candidates(d: int, box: int | None = None) -> list[Fraction]:
    """All c = p/q with max(|p|, q)^(d-1) <= 2, or max(|p|, q) <= box if given."""
    if d < 2:
        raise ArgumentError("d must be >= 2")
    if box is None:
        B = 1
        while (B + 1) ** (d - 1) <= 2:
            B += 1
    else:
        B = box
    out = set()
    for q in range(1, B + 1):
        for p in range(-B, B + 1):
            if math.gcd(p, q) == 1 or p == 0:
                out.add(Fraction(p, q))
    return sorted(out, key=lambda c: (c.numerator, c.denominator))


def unicritical_row(d: int, c: Fraction, cap: int = 10_000) -> EnumerationRow | None:
    F = ComposedMap(MonicPoly([c]), d)
    cert = certify_pcf(F, cap)
    (_, res), = cert.per_critical_point
    if cert.verdict == Verdict.PCF:
        return EnumerationRow(d, c, True, res.orbit, res.tail_length, res.period)
    if cert.verdict == Verdict.NOT_PCF:
        return EnumerationRow(d, c, False, _escape_path(F, res), None, None)
    return None


def _escape_path(F: ComposedMap, res: Escaping) -> tuple[Fraction, ...]:
    z = Fraction(0)
    path = [z]
    for _ in range(res.escape_index):
        z = F(z)
        path.append(z)
    return tuple(path)


def unicritical_enumerate(d: int, box: int | None = None, cap: int = 10_000,
                          jobs: int = 1) -> list[EnumerationRow]:
    """Certified PCF status of z^d + c for every candidate c; only exact verdicts."""
    cands = unicritical_candidates(d, box)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(unicritical_row, [d] * len(cands), cands, [cap] * len(cands)))
    else:
        rows = [unicritical_row(d, c, cap) for c in cands]
    return [r for r in rows if r is not None]


def unicritical_sweep(d_max: int, jobs: int = 1) -> dict[int, list[Fraction]]:
    if d_max < 2:
        raise ArgumentError("d_max must be >= 2")
    table = {}
    for d in range(2, d_max + 1):
        table[d] = [r.c for r in unicritical_enumerate(d, jobs=jobs) if r.pcf]
    union = {c for cs in table.values() for c in cs}
    # h(c) <= log 2, exactly
    assert all(height_top([c]) <= 2 for c in union)
    return table


# -- psi bound and the local lower-bound constants -------------------------------------------------


@dataclass(frozen=True)
class PsiReport:
    m: int
    place: str
    samples: int
    seed: int
    used: int
    infimum_gap: float
    c4_estimate: float
    rng: str = RNG_NAME

    def to_json(self) -> dict:
        return {**self.__dict__, "version": __version__, "empirical": True}


def _psi_dense(crit_monic: Sequence) -> list:
    """psi(z) = integral_0^z h, where g' = m h and h is monic."""
    return [Fraction(0)] + [Fraction(c) / (i + 1) for i, c in enumerate(crit_monic)]


def psi_gap(g: MonicPoly, v: Place = INF) -> float | Fraction | None:
    """max_j log|psi(c_j)|_v - m log||c||_v, or None when ||c|| = 0 or every psi(c_j) = 0.

    At a prime the answer is an exact multiple of log p (returned as that
    rational); at infinity it is a float from validated root disks.
    """
    m = g.degree
    h = [Fraction(c) / m for c in g.dense[1:]]
    h = [c * (i + 1) for i, c in enumerate(h)]
    return _psi_gap_from_h(h, m, v)


def _psi_gap_from_h(h: Sequence, m: int, v: Place):
    psi = _psi_dense(h)
    if not v.is_archimedean:
        c_np = newton_polygon(h, v)
        c_size = c_np.max_slope
        if c_size is None:
            return None
        R = branch_polynomial(psi)
        r_np = newton_polygon(R, v)
        if r_np.max_slope is None:
            return None
        return r_np.max_slope - m * c_size
    disks = root_disks(h)
    ctx = ivl.ivctx()
    cmax = max(ivl.hi(d.modulus(ctx)) for d in disks)
    if cmax == 0:
        return None
    from .polys import p_eval

    ipsi = [ivl.from_rational(c, ctx) for c in psi]
    vals = [ivl.cabs(p_eval(ipsi, d.box(ctx)), ctx) for d in disks]
    top = max(float(ivl.hi(x)) for x in vals)
    if top == 0:
        return None
    return math.log(top) - m * math.log(float(cmax))


def psi_bound_experiment(m: int, samples: int, seed: int, place: Place = INF) -> PsiReport:
    """Empirical infimum of max_j log|psi(c_j)| - m log||c||; C4 estimate = -infimum.

    Archimedean shapes are drawn as random critical configurations in the
    unit disk (half real, half complex); the gap is scale invariant.  p-adic
    shapes use random rational coefficients for h = g'/m with p-power
    denominators, and sizes come from Newton polygons.
    """
    if m < 2:
        raise ArgumentError("m must be >= 2")
    rng = random.Random(seed)
    worst = math.inf
    used = 0
    if place.is_archimedean:
        for i in range(samples):
            if i % 2 == 0:
                cs = np.array([rng.uniform(-1, 1) for _ in range(m - 1)], dtype=complex)
            else:
                cs = np.array([complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(m - 1)])
            cmax = np.max(np.abs(cs))
            if cmax == 0:
                continue
            cs = cs / cmax
            h = np.poly(cs)[::-1]  # constant first, monic
            psi = np.concatenate([[0], h / np.arange(1, m + 1)])
            vals = np.abs(np.polynomial.polynomial.polyval(cs, psi))
            top = np.max(vals)
            if top == 0:
                continue
            worst = min(worst, float(np.log(top)))
            used += 1
        gap = worst
    else:
        p = place.prime
        for _ in range(samples):
            h = [Fraction(rng.randint(-30, 30), p ** rng.randint(0, 3) * rng.randint(1, 5))
                 for _ in range(m - 1)] + [Fraction(1)]
            val = _psi_gap_from_h(h, m, place)
            if val is None:
                continue
            worst = min(worst, float(val))
            used += 1
        gap = worst
    return PsiReport(m, str(place), samples, seed, used, gap, -gap)


C4_MARGIN = 1.0
C4_SAMPLES = 20_000
C4_SEED = 0


@dataclass(frozen=True)
class C3Constant:
    """C3 at one place; ``value`` is a float at infinity, a log p coefficient at primes."""

    m: int
    place: Place
    value: float | Fraction
    empirical: bool
    parts: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        val = format_rational(self.value) if isinstance(self.value, Fraction) else self.value
        return {"m": self.m, "place": str(self.place), "value": val, "empirical": self.empirical,
                "units": "log p" if not self.place.is_archimedean else "natural log",
                "parts": {k: (format_rational(x) if isinstance(x, Fraction) else x)
                          for k, x in self.parts.items()}}


@lru_cache(maxsize=None)
def c3_constant(m: int, v: Place = INF) -> C3Constant:
    if m < 2:
        raise ArgumentError("m must be >= 2")
    if not v.is_archimedean and v.prime > m:
        return C3Constant(m, v, Fraction(0), False)
    if v.is_archimedean:
        ctx = ivl.ivctx()
        c1 = c1_constant(m, ctx)
        log2 = ctx.log(ctx.mpf(2))
        c2 = ctx.mpf(m) / (m - 1) * log2
        c4_emp = psi_bound_experiment(m, C4_SAMPLES, C4_SEED).c4_estimate
        c4 = ctx.mpf(c4_emp) + C4_MARGIN
        a = ctx.mpf(m) / (m - 1) * c1 + c2 / m
        b = ctx.mpf(m) / (2 * m - 1) * log2
        e = (m * c1 + c2 + c4 + ctx.log(ctx.mpf(m))) / (m - 1)
        parts = {"via_g0": ivl.up(ivl.hi(a)), "via_g0_error": ivl.up(ivl.hi(b)),
                 "via_critical_values": ivl.up(ivl.hi(e)), "C4_empirical": c4_emp}
        value = max(parts["via_g0"], parts["via_g0_error"], parts["via_critical_values"])
        return C3Constant(m, v, value, True, parts)
    p = v.prime
    c1 = c1_nonarch(m, p)
    rep = psi_bound_experiment(m, 2000, C4_SEED, v)
    c4 = Fraction(rep.c4_estimate).limit_denominator(10 ** 6) + Fraction(1)
    a = Fraction(m, m - 1) * c1
    e = (m * c1 + c4 + _vp(m, p)) / (m - 1)
    parts = {"via_g0": a, "via_critical_values": e, "C4_empirical": Fraction(rep.c4_estimate).limit_denominator(10 ** 6)}
    return C3Constant(m, v, max(a, e), True, parts)


class Lemma3Result(NamedTuple):
    lambda_lower: float
    rhs: float
    holds: bool


def lemma3_check(g: MonicPoly, d: int, v: Place, C3=None, cap: int = 64,
                 tol: float = 1e-4) -> Lemma3Result:
    """Compare a certified lower bound for lambda_crit,v(g(z^d)) with (log^+||a||_v - C3)/d.

    At a prime, ``C3`` is a coefficient of log p and the comparison is exact
    whenever the local lambda is.  ``C3=None`` uses :func:`c3_constant`.
    """
    m = g.degree
    if m < 2:
        raise ArgumentError("lemma3_check needs m >= 2")
    F = ComposedMap(g, d)
    if C3 is None:
        C3 = c3_constant(m, v).value
    lam = local_crit_lambda(F, v, cap, tol)
    lam_lo, _ = green_bounds(lam)
    ctx = ivl.ivctx()
    if v.is_archimedean:
        a = log_plus(root_sup_log(g, v)).enclosure(ctx)
        rhs = (a - ctx.mpf(C3)) / d
        holds = ivl.hi(rhs) <= 0 or lam_lo >= ivl.hi(rhs)
        return Lemma3Result(ivl.down(lam_lo), float(rhs.mid), bool(holds))
    p = v.prime
    C3 = Fraction(C3)
    rhs_c = (log_plus(root_sup_log(g, v), v).coeff - C3) / d
    if isinstance(lam, ExactNonArch):
        holds = lam.coeff >= rhs_c
    elif isinstance(lam, ZeroCertified):
        holds = rhs_c <= 0
    else:
        holds = rhs_c <= 0 or lam_lo >= ExactNonArch(rhs_c, p).upper()
    rhs = float(rhs_c) * math.log(p)
    return Lemma3Result(ivl.down(lam_lo), rhs, bool(holds))


# -- critical height versus coefficient height -------------------------------------------------------------


def sample_root(rng: random.Random, level: int) -> Fraction:
    """A rational p/q with max(|p|, q) about e^level before reduction."""
    N = max(1, round(math.exp(level)))
    if rng.random() < 0.5:
        p, q = rng.choice((-1, 1)) * N, rng.randint(1, N)
    else:
        p, q = rng.randint(-N, N), N
    return Fraction(p, q)


@dataclass(frozen=True)
class Theorem1Row:
    level: int
    roots: tuple[Fraction, ...]
    h_a: float
    crit_lower: float
    crit_upper: float | None
    deficit: float
    pcf_flag: str


@dataclass
class Theorem1Report:
    m: int
    d: int
    levels: list[int]
    samples: int
    seed: int
    rows: list[Theorem1Row]
    rng: str = RNG_NAME

    @property
    def level_max(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for r in self.rows:
            out[r.level] = max(out.get(r.level, -math.inf), r.deficit)
        return out

    @property
    def c_emp(self) -> float:
        return max(r.deficit for r in self.rows)

    @property
    def running_max(self) -> dict[int, float]:
        """C_emp after each level, levels in increasing order."""
        out, best = {}, -math.inf
        for k, v in sorted(self.level_max.items()):
            best = max(best, v)
            out[k] = best
        return out

    def stable_beyond(self, level: int = 4) -> bool:
        """C_emp does not increase after ``level``: no later level beats the maxima up to it."""
        early = [v for k, v in self.level_max.items() if k <= level]
        late = [v for k, v in self.level_max.items() if k > level]
        return bool(early) and all(v <= max(early) for v in late)

    def to_json(self) -> dict:
        return {
            "version": __version__, "m": self.m, "d": self.d, "levels": self.levels,
            "samples": self.samples, "seed": self.seed, "rng": self.rng,
            "height_convention": "affine max height of the root tuple",
            "c_emp": self.c_emp, "empirical": True,
            "level_max": {str(k): v for k, v in sorted(self.level_max.items())},
            "running_max": {str(k): v for k, v in self.running_max.items()},
            "c_emp_stable_beyond_4": self.stable_beyond(4),
            "rows": [{"level": r.level, "roots": [format_rational(x) for x in r.roots],
                      "h_a": r.h_a, "crit_lower": r.crit_lower, "crit_upper": r.crit_upper,
                      "deficit": r.deficit, "pcf_flag": r.pcf_flag} for r in self.rows],
        }


def theorem1_row(g: MonicPoly, d: int, level: int, cap: int = 200, tol: float = 1e-6) -> Theorem1Row:
    F = ComposedMap(g, d)
    rep = crit_height(F, cap, tol)
    roots = tuple(sorted(_roots_of(g)))
    h_a = height(list(roots))
    lower = ivl.down(rep.total.lo)
    upper = None if rep.total.hi == ivl.POS_INF else ivl.up(rep.total.hi)
    deficit = ivl.up(ivl.hi(h_a.enclosure() - d * ivl.ivctx().mpf(rep.total.lo)))
    return Theorem1Row(level, roots, h_a.value, lower, upper, deficit, rep.pcf_flag.value)


def _roots_of(g: MonicPoly) -> list[Fraction]:
    from .polys import rational_roots

    roots = rational_roots(g.dense)
    if len(roots) != g.degree:
        # rational_roots lists distinct roots; recover multiplicities
        out = []
        rest = list(g.dense)
        for r in roots:
            while True:
                from .polys import p_divmod

                q, rem = p_divmod(rest, [-r, Fraction(1)])
                if any(rem):
                    break
                out.append(r)
                rest = q
        return out
    return roots


def theorem1_experiment(m: int, d: int, height_levels: Sequence[int], samples: int, seed: int,
                        cap: int = 200, tol: float = 1e-6, jobs: int = 1) -> Theorem1Report:
    """Deficits h(a) - d * (certified lower bound of the critical height)."""
    if m < 2 or d < 2:
        raise ArgumentError("theorem1_experiment needs m >= 2 and d >= 2")
    rng = random.Random(seed)
    tasks = []
    for level in height_levels:
        for _ in range(samples):
            roots = [sample_root(rng, level) for _ in range(m)]
            tasks.append((MonicPoly.from_roots(roots), d, level, cap, tol))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_theorem1_job, tasks))
    else:
        rows = [_theorem1_job(t) for t in tasks]
    return Theorem1Report(m, d, list(height_levels), samples, seed, rows)


def _theorem1_job(args) -> Theorem1Row:
    return theorem1_row(*args)
