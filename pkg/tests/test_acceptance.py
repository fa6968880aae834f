"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are repeated
in the pytest terminal summary.  Run directly with
``python3 -m pytest tests/test_acceptance.py -v -s``.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import mpmath

import conftest
from conftest import contains, rand_rational
from pcfheight.arith import INF, abs_log, height, prime, product_formula_residual
from pcfheight.charp import (
    CharPFamily,
    CritStatus,
    FamilyVerdict,
    FFRat,
    charp_critical_points,
    ff_family_pcf_test,
    field,
    infinity,
    product_formula_sum,
    specialization_scan,
)
from pcfheight.charp.family import Specialization
from pcfheight.dynamics import (
    PcfFlag,
    Preperiodic,
    crit_height,
    escape_threshold,
    green_arch,
    green_nonarch,
    orbit,
)
from pcfheight.pcf import (
    Verdict,
    certify_pcf,
    lemma3_check,
    sample_root,
    theorem1_experiment,
    unicritical_enumerate,
)
from pcfheight.polys import ComposedMap, MonicPoly, c1_constant, height_top, lemma1_gap, newton_polygon, p_mul

F = Fraction


def report(n: int, title: str, checks: dict[str, bool], detail: str = "") -> None:
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {title}"
    if detail:
        line += f" [{detail}]"
    if failed:
        line += f" failed: {', '.join(failed)}"
    print(line)
    conftest.ACCEPTANCE.append(line)
    assert ok, line


def cm(cs, d):
    return ComposedMap(MonicPoly(tuple(F(c) for c in cs)), d)


def timed(fn, *a, **kw):
    t = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t


# 1 ---------------------------------------------------------------------------------


def test_criterion_1_unicritical_enumeration():
    checks, times = {}, {}
    for d, want in ((2, {0, -1, -2}), (3, {0}), (4, {0, -1})):
        rows, dt = timed(unicritical_enumerate, d)
        times[d] = dt
        checks[f"d={d} set"] = {r.c for r in rows if r.pcf} == want
        checks[f"d={d} < 1 s"] = dt < 1.0

    def box8():
        found, inconclusive = set(), 0
        for p in range(0, 9):
            for q in range(1, 9):
                if math.gcd(p, q) != 1:
                    continue
                for c in {F(p, q), F(-p, q)}:
                    v = certify_pcf(cm([c], 2)).verdict
                    inconclusive += v == Verdict.INCONCLUSIVE
                    if v == Verdict.PCF:
                        found.add(c)
        return found, inconclusive

    (found, inconclusive), dt = timed(box8)
    checks["box 8 finds only {0,-1,-2}"] = found == {0, -1, -2} and inconclusive == 0
    checks["box 8 < 60 s"] = dt < 60
    report(1, "unicritical enumeration", checks,
           ", ".join(f"d={d}: {t:.3f}s" for d, t in times.items()) + f", box 8: {dt:.2f}s")


# 2 ---------------------------------------------------------------------------------


def test_criterion_2_bound_sharpness():
    c = F(-2)
    res = orbit(cm([c], 2), F(0), 100)
    checks = {
        # h(c) = log H(c); equality log 2 = log 2/(d-1) at d = 2 is the integer identity H = 2
        "h(-2) = log 2 exactly": height_top([c]) == 2,
        "h(-2) enclosure": contains(height([c]), lambda: mpmath.log(2)),
        "PCF": certify_pcf(cm([c], 2)).verdict == Verdict.PCF,
        "orbit 0 -> -2 -> 2 -> 2": isinstance(res, Preperiodic) and res.orbit == (0, -2, 2)
        and (res.tail_length, res.period) == (2, 1),
    }
    report(2, "bound sharpness at c = -2", checks)


# 3 ---------------------------------------------------------------------------------


def escape_rate_oracle():
    """G(0) for z^2 + 1 as G(1)/2 = lim log|f^n(1)| / 2^(n+1), plain high precision."""
    with mpmath.workdps(80):
        z = mpmath.mpf(1)
        for _ in range(40):
            z = z * z + 1
        return mpmath.log(z) / mpmath.mpf(2) ** 41


def test_criterion_3_critical_heights():
    a = crit_height(cm([-2], 2))
    b = crit_height(cm([-1, 0], 2))
    c, dt = timed(crit_height, cm([1], 2), cap=60, tol=1e-7)
    oracle = escape_rate_oracle()
    width = c.total.hi - c.total.lo
    checks = {
        "z^2-2 zero, CertifiedPCF": a.total.lo == a.total.hi == 0 and a.pcf_flag == PcfFlag.CERTIFIED_PCF,
        "z^4-1 zero, CertifiedPCF": b.total.lo == b.total.hi == 0 and b.pcf_flag == PcfFlag.CERTIFIED_PCF,
        "z^2+1 in 0.2037 +- 1e-3": abs(c.total.lo - mpmath.mpf("0.2037")) <= 1e-3
        and abs(c.total.hi - mpmath.mpf("0.2037")) <= 1e-3,
        "z^2+1 width <= 1e-6": width <= 1e-6,
        "z^2+1 contains oracle": contains(c.total, oracle),
        "z^2+1 CertifiedNotPCF": c.pcf_flag == PcfFlag.CERTIFIED_NOT_PCF,
    }
    report(3, "critical height values", checks,
           f"z^2+1: [{mpmath.nstr(c.total.lo, 12)}, {mpmath.nstr(c.total.hi, 12)}], "
           f"width {mpmath.nstr(width, 3)}, oracle {mpmath.nstr(oracle, 12)}, {dt:.2f}s")


# 4 ---------------------------------------------------------------------------------


def test_criterion_4_lemma1():
    r = random.Random(4)
    failures, worst = 0, {}
    for m in (2, 3, 4, 5):
        C1 = c1_constant(m)
        worst[m] = 0.0
        for _ in range(1000):
            g = MonicPoly(tuple(F(r.randint(-100, 100), r.randint(1, 100)) for _ in range(m)))
            for p in (7, 11, 13):
                failures += lemma1_gap(g, prime(p)).coeff != 0
            gap = lemma1_gap(g, INF)
            failures += not gap.hi <= C1.a
            worst[m] = max(worst[m], float(gap.hi))
    report(4, "root/critical-point gap", {"zero failures": failures == 0},
           "max arch gap / C1: " + ", ".join(f"m={m}: {w:.3f}/{float(c1_constant(m).a):.3f}"
                                            for m, w in worst.items()))


# 5 ---------------------------------------------------------------------------------


def _basin_sample(r):
    m, d = r.randint(2, 4), r.randint(2, 3)
    F_ = cm([rand_rational(r, 20) for _ in range(m)], d)
    v = r.choice([INF, prime(2), prime(3), prime(5)])
    T = escape_threshold(F_, v)
    if v.is_archimedean:
        z0 = F(int(mpmath.exp(float(T.hi) / d)) + r.randint(1, 100), r.randint(1, 3))
        ok = d * abs_log(z0, v).lo > T.hi
    else:
        k = int(T.coeff / d) + 1 + r.randint(0, 2)
        z0 = F(r.choice([1, -1]) * r.randint(1, 30), v.prime ** k)
        ok = d * abs_log(z0, v).coeff > T.coeff
    return (F_, z0, v) if ok else None


def test_criterion_5_lemma2():
    r = random.Random(5)
    samples = []
    while len(samples) < 500:
        s = _basin_sample(r)
        if s:
            samples.append(s)
    exact_fail = bracket_fail = fe_fail = 0
    for F_, z0, v in samples:
        if not v.is_archimedean:
            G = green_nonarch(F_, z0, v.prime)
            exact_fail += G != abs_log(z0, v)
            exact_fail += green_nonarch(F_, F_(z0), v.prime).coeff != F_.D * G.coeff
            continue
        m, d = F_.m, F_.d
        G = green_arch(F_, z0, tol=1e-8, cap=100)
        Gf = green_arch(F_, F_(z0), tol=1e-8, cap=100)
        lz = abs_log(z0, INF)
        with mpmath.workprec(200):
            lo = -mpmath.mpf(m) / (d * m - 1) * mpmath.log(2)
            hi = mpmath.mpf(m) / (d * m - 1) * mpmath.log(mpmath.mpf(3) / 2)
            bracket_fail += not (G.lo - lz.hi >= lo and G.hi - lz.lo <= hi)
            resid = max(abs(Gf.lo - F_.D * G.hi), abs(Gf.hi - F_.D * G.lo))
            fe_fail += resid > (Gf.hi - Gf.lo) + F_.D * (G.hi - G.lo)
    n_arch = sum(v.is_archimedean for _, _, v in samples)
    report(5, "basin Green function", {"non-arch exact": exact_fail == 0, "arch bracket": bracket_fail == 0,
                                "functional equation": fe_fail == 0},
           f"{len(samples)} samples, {n_arch} archimedean")


# 6 ---------------------------------------------------------------------------------


def test_criterion_6_lemma3_theorem1():
    r = random.Random(6)
    fails = 0
    for m in (2, 3):
        for d in (2, 3):
            for _ in range(1000):
                g = MonicPoly.from_roots([sample_root(r, r.randint(0, 6)) for _ in range(m)])
                for v in (INF, prime(2), prime(5), prime(7)):
                    fails += not lemma3_check(g, d, v).holds
    rep = theorem1_experiment(3, 2, [2, 4, 6, 8, 10], 50, seed=7)
    running = rep.running_max
    report(6, "local lower bound and critical height experiment",
           {"lemma3 zero failures": fails == 0, "C_emp finite": math.isfinite(rep.c_emp),
            "non-increasing beyond level 4": rep.stable_beyond(4)},
           f"C_emp = {rep.c_emp:.4f} (expected <= 5), per-level max "
           + ", ".join(f"{k}: {v:.3f}" for k, v in rep.level_max.items())
           + "; running max " + ", ".join(f"{k}: {v:.3f}" for k, v in running.items()))


# 7 ---------------------------------------------------------------------------------


def test_criterion_7_charp():
    fam = CharPFamily.from_json([[0, 1], [0]], 2, 5)
    res = ff_family_pcf_test(fam)
    rows, dt = timed(specialization_scan, fam, 5)
    sizes = [row.max_size for row in rows]
    checks = {
        "z^2+t NotPCF at Infinity, 1/8": res.verdict == FamilyVerdict.NOT_PCF
        and res.witness == infinity(5) and res.bound == F(1, 8),
        "scan k<=5 strictly increasing": all(a < b for a, b in zip(sizes, sizes[1:])) and len(sizes) == 5,
    }
    wild = {}
    for p, e in ((3, 1), (3, 2), (5, 1)):
        n = p ** e
        family = CharPFamily.from_json([[0], [0, 1]] + [[0]] * (n - 2), 1, p)
        status_t = charp_critical_points(family.f_dense).status
        ok, count = status_t == CritStatus.NO_AFFINE_CRITICAL, 0
        for k in range(1, 4):
            Fq = field(p, k)
            for t0 in range(1, Fq.q):
                s = Specialization(family, Fq, t0)
                cs = charp_critical_points(s.dense, Fq)
                ok &= cs.status == CritStatus.NO_AFFINE_CRITICAL and not cs.points
                count += 1
        wild[(p, e)] = count
        checks[f"z^{n}+tz empty critical set"] = ok
    report(7, "characteristic p", checks,
           f"max sizes {sizes} ({dt:.2f}s); wild specializations checked {wild}")


# 8 ---------------------------------------------------------------------------------


def test_criterion_8_product_formulas():
    r = random.Random(8)
    q_fail = 0
    for _ in range(1000):
        x = rand_rational(r, 10**9, nonzero=True)
        exact, enc = product_formula_residual(x)
        q_fail += exact != 1 or not (enc.a <= 0 <= enc.b)
    f_fail = 0
    for _ in range(1000):
        num = [r.randrange(5) for _ in range(r.randint(1, 8))]
        den = [r.randrange(5) for _ in range(r.randint(1, 8))]
        if not any(num) or not any(den):
            num, den = num + [1], den + [1]
        f_fail += product_formula_sum(FFRat.from_json([num, den], 5)) != 0
    report(8, "product formulas", {"Q": q_fail == 0, "F5(t)": f_fail == 0})


# 9 ---------------------------------------------------------------------------------


def test_criterion_9_newton_polygon_oracle():
    r = random.Random(9)
    fails = 0
    for _ in range(200):
        p = r.choice([2, 3, 5, 7])
        roots = [rand_rational(r, 10**3, nonzero=True) for _ in range(r.randint(1, 6))]
        poly = [F(1)]
        for x in roots:
            poly = p_mul(poly, [-x, F(1)])
        want = max(abs_log(x, prime(p)).coeff for x in roots)
        fails += newton_polygon(poly, prime(p)).max_slope != want
    report(9, "Newton polygon oracle", {"zero failures": fails == 0})


# 10 --------------------------------------------------------------------------------


def test_criterion_10_termination():
    def run_all():
        inconclusive, n = [], 0
        cs = {F(s * p, q) for p in range(0, 51) for q in range(1, 51) if math.gcd(p, q) == 1 for s in (1, -1)}
        for c in sorted(cs):
            n += 1
            if certify_pcf(cm([c], 2)).verdict == Verdict.INCONCLUSIVE:
                inconclusive.append(c)
        return inconclusive, n

    (inconclusive, n), dt = timed(run_all)
    report(10, "termination on z^2 + c", {"never Inconclusive": not inconclusive, "within 4 min": dt < 240},
           f"{n} maps in {dt:.2f}s")
