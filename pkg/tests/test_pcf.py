from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import pytest

from pcfheight.arith import INF, height, prime
from pcfheight.dynamics import Escaping, PcfFlag
from pcfheight.pcf import (
    Verdict,
    c3_constant,
    certify_pcf,
    lemma3_check,
    psi_bound_experiment,
    psi_gap,
    sample_root,
    theorem1_experiment,
    theorem1_row,
    unicritical_candidates,
    unicritical_enumerate,
    unicritical_sweep,
)
from pcfheight.polys import ComposedMap, MonicPoly, height_top

from conftest import contains, rand_rational

F = Fraction


def cm(cs, d):
    return ComposedMap(MonicPoly(tuple(F(c) for c in cs)), d)


def pcf_set(d, box=None):
    return {row.c for row in unicritical_enumerate(d, box) if row.pcf}


# -- certify_pcf ------------------------------------------------------------------


def test_certify_examples():
    cert = certify_pcf(cm([-1], 2))
    assert cert.verdict == Verdict.PCF and set(cert.postcritical_set) == {-1, 0}
    cert = certify_pcf(cm([1], 2))
    assert cert.verdict == Verdict.NOT_PCF
    (_, res), = cert.per_critical_point
    assert isinstance(res, Escaping) and res.place == INF and res.escape_index == 3
    cert = certify_pcf(cm([-1, 0], 2))
    assert cert.verdict == Verdict.PCF and set(cert.postcritical_set) == {-1, 0}


def test_certify_irrational_critical_points():
    # z^3 + 100 z has critical points +-sqrt(-100/3); the critical values escape
    assert certify_pcf(cm([0, 100, 0], 1)).verdict == Verdict.NOT_PCF
    # z^3 - 2z: irrational critical points +-sqrt(2/3), values of size > 1 at 3
    assert certify_pcf(cm([0, -2, 0], 1)).verdict == Verdict.NOT_PCF


def test_chebyshev_cubic_is_pcf():
    # z^3 - 3z: critical points +-1 map to -+2, and 2 -> 2, -2 -> -2
    cert = certify_pcf(cm([0, -3, 0], 1))
    assert cert.verdict == Verdict.PCF and set(cert.postcritical_set) == {2, -2}


def test_cap_stability():
    r = random.Random(51)
    for _ in range(60):
        F_ = cm([rand_rational(r, 6) for _ in range(r.randint(1, 2))], r.randint(2, 3))
        verdicts = [certify_pcf(F_, cap).verdict for cap in (3, 30, 300)]
        exact = [v for v in verdicts if v != Verdict.INCONCLUSIVE]
        assert len(set(exact)) <= 1
        # once exact, stays exact
        seen = False
        for v in verdicts:
            seen = seen or v != Verdict.INCONCLUSIVE
            assert not seen or v != Verdict.INCONCLUSIVE


# -- unicritical enumeration ------------------------------------------------------------


def test_candidates_d2():
    assert set(unicritical_candidates(2)) == {0, 1, -1, 2, -2, F(1, 2), F(-1, 2)}
    assert set(unicritical_candidates(3)) == {0, 1, -1}


@pytest.mark.parametrize("d,expected", [(2, {0, -1, -2}), (3, {0}), (4, {0, -1}), (5, {0}), (6, {0, -1})])
def test_enumerate(d, expected):
    assert pcf_set(d) == expected


def test_enumerate_rows_within_height_bound():
    for d in range(2, 7):
        for row in unicritical_enumerate(d):
            if row.pcf:
                # h(c) <= log 2/(d-1)  iff  H(c)^(d-1) <= 2, with H = exp h an integer
                assert height_top([row.c]) ** (d - 1) <= 2


def test_enumeration_completeness_box8():
    cands = {F(0)} | {F(s * p, q) for p in range(1, 9) for q in range(1, 9) if math.gcd(p, q) == 1 for s in (1, -1)}
    found = set()
    for c in cands:
        cert = certify_pcf(cm([c], 2))
        assert cert.verdict != Verdict.INCONCLUSIVE
        if cert.verdict == Verdict.PCF:
            found.add(c)
    assert found == {0, -1, -2}
    assert pcf_set(2, box=8) == found


def test_minus_one_parity():
    for d in range(2, 65):
        v = certify_pcf(cm([-1], d)).verdict
        assert v == (Verdict.PCF if d % 2 == 0 else Verdict.NOT_PCF)


def test_sweep():
    table = unicritical_sweep(6)
    assert {d: set(cs) for d, cs in table.items()} == {
        2: {0, -1, -2}, 3: {0}, 4: {0, -1}, 5: {0}, 6: {0, -1}}


def test_boundary_c_minus_2():
    (row,) = [r for r in unicritical_enumerate(2) if r.c == -2]
    assert row.orbit == (0, -2, 2) and (row.tail, row.period) == (2, 1)
    assert height_top([F(-2)]) == 2  # h(-2) = log 2, the bound itself
    assert contains(height([F(-2)]), lambda: mpmath.log(2))


# -- local lower bound ------------------------------------------------------------------------------


def test_lemma3_examples():
    res = lemma3_check(MonicPoly((F(-16), F(0))), 2, INF, C3=3.0)
    assert res.holds and res.rhs < 0 and abs(res.lambda_lower - math.log(2)) < 1e-4
    res = lemma3_check(MonicPoly((F(-1, 9), F(0))), 2, prime(3), C3=0)
    assert res.holds and abs(res.lambda_lower - math.log(3) / 2) < 1e-12
    assert abs(res.rhs - math.log(3) / 2) < 1e-12
    res = lemma3_check(MonicPoly((F(-1), F(0))), 2, prime(5), C3=0)
    assert res.holds and res.lambda_lower >= 0 and res.rhs == 0


def test_lemma3_equality_case_is_exact():
    # lambda = rhs exactly: no rounding may flip holds
    for k in range(1, 6):
        g = MonicPoly((F(-1, 9 ** k), F(0)))
        assert lemma3_check(g, 2, prime(3), C3=0).holds


def test_lemma3_fails_with_inadmissible_constant():
    # a negative C3 exceeds what lambda can reach at an equality case
    res = lemma3_check(MonicPoly((F(-1, 9), F(0))), 2, prime(3), C3=-1)
    assert not res.holds


def test_c3_zero_at_large_primes():
    for m in (2, 3, 4):
        for p in (5, 7, 11):
            if p > m:
                assert c3_constant(m, prime(p)).value == 0


def test_lemma3_random_samples():
    r = random.Random(61)
    for m in (2, 3):
        for d in (2, 3):
            for _ in range(25):
                g = MonicPoly.from_roots([sample_root(r, r.randint(0, 6)) for _ in range(m)])
                for v in (INF, prime(2), prime(5), prime(7)):
                    assert lemma3_check(g, d, v).holds, (g, d, v)


# -- psi experiment ------------------------------------------------------------------------


def test_psi_gap_examples():
    assert psi_gap(MonicPoly((F(-16), F(0)))) is None
    assert abs(psi_gap(MonicPoly((F(0), F(1)))) + math.log(2)) < 1e-12
    assert abs(psi_gap(MonicPoly((F(0), F(-3), F(0)))) - math.log(2 / 3)) < 1e-12


def test_psi_experiment_deterministic():
    a = psi_bound_experiment(3, 500, seed=4)
    b = psi_bound_experiment(3, 500, seed=4)
    assert a.to_json() == b.to_json()
    assert a.c4_estimate >= math.log(3 / 2)  # z^3 - 3z alone forces -log(2/3)


# -- critical height experiment ---------------------------------------------------------------------


def test_theorem1_row_z2_minus_16():
    row = theorem1_row(MonicPoly.from_roots([4, -4]), 2, 3)
    assert row.pcf_flag == PcfFlag.CERTIFIED_NOT_PCF.value
    # oracle: lambda_inf = G(-16)/4 and G(-16) = G(f^n(-16))/4^n
    with mpmath.workdps(60):
        z = mpmath.mpf(-16)
        for _ in range(8):
            z = z ** 4 - 16
        lam = mpmath.log(abs(z)) / mpmath.mpf(4) ** 8 / 4
        deficit = mpmath.log(4) - 2 * lam
    assert row.crit_lower <= float(lam) <= row.crit_upper
    assert abs(row.deficit - float(deficit)) < 1e-6
    # close to, but strictly above, the naive value log 4 - 2 log 2 = 0
    assert 0 < float(deficit) < 1e-4


def test_theorem1_row_z2_minus_1():
    row = theorem1_row(MonicPoly.from_roots([1, -1]), 2, 0)
    assert row.deficit == 0 and row.h_a == 0


def test_theorem1_experiment_deterministic_and_bounded():
    a = theorem1_experiment(3, 2, [2, 4, 6], 8, seed=7)
    b = theorem1_experiment(3, 2, [2, 4, 6], 8, seed=7)
    assert a.to_json() == b.to_json()
    assert math.isfinite(a.c_emp) and a.c_emp <= 5
