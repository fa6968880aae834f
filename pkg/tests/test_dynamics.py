from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest

from pcfheight.arith import INF, ArchInterval, ExactNonArch, abs_log, prime
from pcfheight.dynamics import (
    Capped,
    Escaping,
    PcfFlag,
    Preperiodic,
    Undetermined,
    ZeroCertified,
    ZeroReason,
    crit_height,
    escape_threshold,
    green_arch,
    green_bounds,
    green_nonarch,
    local_crit_lambda,
    orbit,
)
from pcfheight.polys import ComposedMap, MonicPoly

from conftest import contains, rand_rational

F = Fraction


def cm(cs, d):
    return ComposedMap(MonicPoly(tuple(F(c) for c in cs)), d)


def escape_rate(F_, z0, n=40, dps=60):
    """Independent oracle: log|f^n(z0)| / D^n in plain high-precision floats."""
    with mpmath.workdps(dps):
        z = mpmath.mpf(z0.numerator) / z0.denominator
        for _ in range(n):
            z = sum(mpmath.mpf(c.numerator) / c.denominator * z ** (F_.d * i)
                    for i, c in enumerate(F_.g.dense))
        return mpmath.log(abs(z)) / mpmath.mpf(F_.D) ** n


# -- thresholds and orbits --------------------------------------------------------


def test_escape_threshold_examples():
    assert escape_threshold(cm([F(1, 2)], 2), prime(2)) == ExactNonArch(F(1), 2)
    assert escape_threshold(cm([-1, 0], 2), prime(3)) == ExactNonArch(F(0), 3)
    assert contains(escape_threshold(cm([-16, 0], 2), INF), lambda: mpmath.log(4) + 2 * mpmath.log(2))


def test_orbit_examples():
    assert orbit(cm([-1, 0], 1), F(0), 100) == Preperiodic(0, 2, (F(0), F(-1)))
    assert orbit(cm([1], 2), F(0), 100) == Escaping(INF, 3, F(5))
    assert orbit(cm([-2], 2), F(1, 2), 100) == Escaping(prime(2), 0, F(1, 2))


def test_orbit_tail_and_cap():
    # z^2 - 2 from 0: 0 -> -2 -> 2 -> 2
    res = orbit(cm([-2], 2), F(0), 100)
    assert isinstance(res, Preperiodic) and (res.tail_length, res.period) == (2, 1)
    assert isinstance(orbit(cm([-2], 2), F(0), 1), Capped)


# -- Green functions ----------------------------------------------------------------


def test_green_nonarch_examples():
    assert green_nonarch(cm([F(1, 2)], 2), F(1, 2), 2) == ExactNonArch(F(1), 2)
    assert green_nonarch(cm([-1], 2), F(0), 3) == ZeroCertified(ZeroReason.INTEGRAL_BOUNDED)
    assert green_nonarch(cm([F(1, 3)], 2), F(0), 3) == ExactNonArch(F(1, 2), 3)


def test_green_nonarch_preperiodic_and_undetermined():
    # z^2 - 3/4 fixes 3/2, which is not 2-integral
    F_ = cm([F(-3, 4)], 2)
    assert F_(F(3, 2)) == F(3, 2)
    assert green_nonarch(F_, F(3, 2), 2) == ZeroCertified(ZeroReason.PREPERIODIC_ORBIT)
    res = green_nonarch(cm([F(-3, 4)], 2), F(1, 7), 2, cap=3)
    assert isinstance(res, (Undetermined, ExactNonArch, ZeroCertified))


def test_green_arch_examples():
    g = green_arch(cm([0], 2), F(2))
    assert contains(g, lambda: mpmath.log(2)) and g.hi - g.lo <= 1e-9
    g = green_arch(cm([-2], 2), F(3), tol=1e-6)
    assert contains(g, lambda: mpmath.log((3 + mpmath.sqrt(5)) / 2)) and g.hi - g.lo <= 1e-6
    g = green_arch(cm([1], 2), F(0), tol=1e-3)
    assert abs(float(g.lo) - 0.2037) < 1e-3 and g.hi - g.lo <= 1e-3


def test_green_arch_matches_escape_rate_oracle():
    r = random.Random(31)
    compared = 0
    for _ in range(30):
        F_ = cm([rand_rational(r, 5) for _ in range(r.randint(1, 3))], r.randint(2, 3))
        z0 = rand_rational(r, 8)
        g = green_arch(F_, z0, tol=1e-8, cap=200)
        if not isinstance(g, ArchInterval):
            continue
        # oracle diverges slowly for bounded orbits; only compare escaping points
        if g.lo <= 0:
            continue
        with mpmath.workdps(80):
            est = escape_rate(F_, z0, n=12, dps=80)
        assert float(g.lo) - 1e-6 <= float(est) <= float(g.hi) + 1e-6
        compared += 1
    assert compared >= 5


def test_green_arch_complex_point():
    # z^2 at i: G = log+|i| = 0; at 2i: log 2
    g = green_arch(cm([0], 2), 2j)
    assert contains(g, lambda: mpmath.log(2))


def test_monotone_refinement():
    F_ = cm([1], 2)
    widths = []
    for cap in (4, 6, 8, 12, 20):
        g = green_arch(F_, F(0), tol=1e-30, cap=cap)
        lo, hi = green_bounds(g)
        widths.append(hi - lo)
    assert all(b <= a for a, b in zip(widths, widths[1:]))


# -- basin properties ---------------------------------------------------------------


def basin_samples(r, count, places):
    """(F, z0, v) with the basin condition d log|z0|_v > T_v."""
    out = []
    while len(out) < count:
        m, d = r.randint(2, 4), r.randint(2, 3)
        F_ = cm([rand_rational(r, 20) for _ in range(m)], d)
        v = r.choice(places)
        T = escape_threshold(F_, v)
        if v.is_archimedean:
            bound = float(T.hi) / d
            z0 = F(int(mpmath.exp(bound)) + r.randint(1, 50), r.randint(1, 3))
            if d * float(abs_log(z0, v).lo) <= float(T.hi):
                continue
        else:
            k = int(T.coeff / d) + 1 + r.randint(0, 2)
            z0 = F(r.choice([1, -1]) * r.randint(1, 30), v.prime ** k)
            if d * abs_log(z0, v).coeff <= T.coeff:
                continue
        out.append((F_, z0, v))
    return out


def test_lemma2_nonarch_exact():
    r = random.Random(41)
    for F_, z0, v in basin_samples(r, 150, [prime(2), prime(3), prime(5)]):
        assert green_nonarch(F_, z0, v.prime) == abs_log(z0, v)


def test_lemma2_arch_bracket():
    r = random.Random(42)
    for F_, z0, v in basin_samples(r, 60, [INF]):
        g = green_arch(F_, z0, tol=1e-6, cap=100)
        m, d = F_.m, F_.d
        lz = abs_log(z0, INF)
        with mpmath.workprec(200):
            lo = -mpmath.mpf(m) / (d * m - 1) * mpmath.log(2)
            hi = mpmath.mpf(m) / (d * m - 1) * mpmath.log(mpmath.mpf(3) / 2)
            assert g.lo - lz.hi >= lo - mpmath.mpf(10) ** -40
            assert g.hi - lz.lo <= hi + mpmath.mpf(10) ** -40


def test_functional_equation():
    r = random.Random(43)
    for F_, z0, v in basin_samples(r, 80, [INF, prime(2), prime(3)]):
        if v.is_archimedean:
            a = green_arch(F_, z0, tol=1e-7, cap=100)
            b = green_arch(F_, F_(z0), tol=1e-7, cap=100)
            slack = (a.hi - a.lo) * F_.D + (b.hi - b.lo) + mpmath.mpf(10) ** -30
            assert abs(b.lo - F_.D * a.lo) <= slack
        else:
            a = green_nonarch(F_, z0, v.prime)
            b = green_nonarch(F_, F_(z0), v.prime)
            assert b.coeff == F_.D * a.coeff


# -- critical lambda and critical height ---------------------------------------------------


def test_local_crit_lambda_examples():
    for v in (INF, prime(2), prime(3)):
        assert isinstance(local_crit_lambda(cm([-1, 0], 2), v), ZeroCertified)
    lam = local_crit_lambda(cm([1], 2), INF)
    assert abs(float(lam.lo) - 0.2037) < 1e-3
    assert local_crit_lambda(cm([F(1, 2)], 2), prime(2)) == ExactNonArch(F(1, 2), 2)


def test_lambda_nonnegative():
    r = random.Random(44)
    for _ in range(40):
        F_ = cm([rand_rational(r, 12) for _ in range(r.randint(1, 3))], r.randint(2, 3))
        for v in (INF, prime(2), prime(3), prime(5)):
            lo, hi = green_bounds(local_crit_lambda(F_, v, cap=64, tol=1e-4))
            assert lo >= 0 and hi >= lo


def test_crit_height_examples():
    rep = crit_height(cm([-2], 2))
    assert rep.pcf_flag == PcfFlag.CERTIFIED_PCF and rep.total.lo == rep.total.hi == 0
    rep = crit_height(cm([-1, 0], 2))
    assert rep.pcf_flag == PcfFlag.CERTIFIED_PCF and rep.total.lo == rep.total.hi == 0
    rep = crit_height(cm([1], 2), cap=60, tol=1e-7)
    assert rep.pcf_flag == PcfFlag.CERTIFIED_NOT_PCF
    assert abs(float(rep.total.lo) - 0.2037) < 1e-3 and rep.total.hi - rep.total.lo <= 1e-6
    with mpmath.workdps(60):
        oracle = escape_rate(cm([1], 2), F(1), n=30) / 2
    assert contains(rep.total, oracle)


@pytest.mark.parametrize("c", [F(0), F(-1), F(-2), F(1), F(2), F(-1, 2), F(1, 2), F(-3, 4)])
def test_zero_height_iff_pcf(c):
    rep = crit_height(cm([c], 2), cap=200, tol=1e-6)
    zero = rep.total.lo == rep.total.hi == 0
    assert zero == (rep.pcf_flag == PcfFlag.CERTIFIED_PCF)
    if c in (0, -1, -2):
        assert zero
