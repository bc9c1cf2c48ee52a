"""
Tests for the certified interval enclosures.
"""

from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from scripts.intervals import (
    CertifiedInterval,
    exp_enclosure,
    exp_interval,
    log_enclosure,
    pi_enclosure,
    pi_power_enclosure,
)

WIDTH = Fraction(1, 10 ** 40)


def _contains_mp(interval: CertifiedInterval, value) -> bool:
    with mp.workdps(120):
        return mp.mpf(interval.lo.numerator) / interval.lo.denominator <= value <= \
            mp.mpf(interval.hi.numerator) / interval.hi.denominator


@pytest.mark.parametrize("r", [Fraction(0), Fraction(1), Fraction(-1, 4), Fraction(-17, 2), Fraction(51, 4),
                               Fraction(-300), Fraction(1, 3)])
def test_exp_enclosure_contains_true_value(r):
    enclosure = exp_enclosure(r, WIDTH)
    assert enclosure.width <= WIDTH
    with mp.workdps(120):
        assert _contains_mp(enclosure, mp.exp(mp.mpf(r.numerator) / r.denominator))


def test_exp_of_zero_is_exact():
    assert exp_enclosure(0, WIDTH) == CertifiedInterval.point(1)


def test_pi_and_half_powers():
    with mp.workdps(120):
        assert _contains_mp(pi_enclosure(WIDTH), mp.pi)
        for p in (-3, -1, 1, 2, 5):
            enclosure = pi_power_enclosure(p, WIDTH)
            assert enclosure.width <= WIDTH
            assert _contains_mp(enclosure, mp.pi ** (mp.mpf(p) / 2))


@pytest.mark.parametrize("x", [Fraction(85, 2), Fraction(2, 85), Fraction(1, 2), Fraction(3), Fraction(10 ** 9)])
def test_log_enclosure(x):
    enclosure = log_enclosure(x, WIDTH)
    assert enclosure.width <= WIDTH
    with mp.workdps(120):
        assert _contains_mp(enclosure, mp.log(mp.mpf(x.numerator) / x.denominator))


def test_log_rejects_non_positive():
    with pytest.raises(ValueError):
        log_enclosure(0, WIDTH)


def test_interval_arithmetic_is_outward():
    a = CertifiedInterval(Fraction(-1), Fraction(2))
    b = CertifiedInterval(Fraction(3), Fraction(4))
    assert a + b == CertifiedInterval(Fraction(2), Fraction(6))
    assert a - b == CertifiedInterval(Fraction(-5), Fraction(-1))
    assert a * b == CertifiedInterval(Fraction(-4), Fraction(8))
    assert (a * 2).contains(Fraction(4))
    assert not a.excludes_zero() and a.sign() == 0
    assert b.sign() == 1 and (-b).sign() == -1
    assert a ** 2 == CertifiedInterval(Fraction(0), Fraction(4))


def test_reciprocal_of_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        CertifiedInterval(Fraction(-1), Fraction(1)).reciprocal()


def test_exp_interval_is_monotone_enclosure():
    argument = CertifiedInterval(Fraction(-1), Fraction(1))
    enclosure = exp_interval(argument, WIDTH)
    with mp.workdps(120):
        assert _contains_mp(enclosure, mp.exp(-1)) and _contains_mp(enclosure, mp.e)


def test_three_term_maximum_is_negative():
    # -3 + (26/5) (2/85)^(2/13)
    power = exp_interval(log_enclosure(Fraction(85, 2), WIDTH) * Fraction(-2, 13), WIDTH)
    enclosure = power * Fraction(26, 5) + (-3)
    assert enclosure.excludes_zero() and enclosure.sign() == -1
    with mp.workdps(120):
        reference = -3 + mp.mpf(26) / 5 * (mp.mpf(2) / 85) ** (mp.mpf(2) / 13)
        assert _contains_mp(enclosure, reference)


# ---------------------------------------------------------------------------
# Randomised soundness against 200-digit references
# ---------------------------------------------------------------------------

REFERENCE_DPS = 200
TARGET_WIDTHS = [Fraction(1, 10 ** k) for k in (10, 20, 30, 40, 50)]


def _to_mpf(value: Fraction):
    return mp.mpf(value.numerator) / value.denominator


def _assert_sound(enclosure: CertifiedInterval, reference, width: Fraction):
    assert enclosure.width <= width
    assert _to_mpf(enclosure.lo) <= reference <= _to_mpf(enclosure.hi)


def _random_exponents(seed: int, count: int = 1000):
    rng = np.random.default_rng(seed)
    denominators = rng.integers(1, 1000, size=count)
    numerators = [int(rng.integers(-20 * int(q), 20 * int(q) + 1)) for q in denominators]
    widths = rng.integers(0, len(TARGET_WIDTHS), size=count)
    return [(Fraction(p, int(q)), TARGET_WIDTHS[int(w)]) for p, q, w in zip(numerators, denominators, widths)]


def test_random_exp_enclosures_are_sound():
    with mp.workdps(REFERENCE_DPS):
        for r, width in _random_exponents(7):
            _assert_sound(exp_enclosure(r, width), mp.exp(_to_mpf(r)), width)


def test_random_log_enclosures_are_sound():
    with mp.workdps(REFERENCE_DPS):
        for r, width in _random_exponents(11):
            x = abs(r) if r != 0 else Fraction(1, 7)
            _assert_sound(log_enclosure(x, width), mp.log(_to_mpf(x)), width)


def test_random_pi_power_enclosures_are_sound():
    rng = np.random.default_rng(13)
    with mp.workdps(REFERENCE_DPS):
        for _ in range(1000):
            p = int(rng.integers(-40, 41))
            width = TARGET_WIDTHS[int(rng.integers(0, len(TARGET_WIDTHS)))]
            _assert_sound(pi_power_enclosure(p, width), mp.pi ** (mp.mpf(p) / 2), width)
