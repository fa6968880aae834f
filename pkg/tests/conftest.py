from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest


def rand_rational(rng: random.Random, bound: int, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if x or not nonzero:
            return x


@pytest.fixture
def rng():
    return random.Random(20240601)


def contains(enc, value) -> bool:
    """lo <= value <= hi, with ``value`` a callable evaluated at 320 bits."""
    with mpmath.workprec(320):
        v = value() if callable(value) else mpmath.mpf(value)
        lo, hi = (enc.a, enc.b) if hasattr(enc, "a") else (enc.lo, enc.hi)
        return lo <= v <= hi


# acceptance lines recorded by test_acceptance.report, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
