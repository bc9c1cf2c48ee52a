"""
Certified Intervals Module

Rational-endpoint enclosures with outward rounding, and certified enclosures
of e^r, pi, pi^(p/2) and log(x) for rational arguments. All series are summed
in fixed-point integer arithmetic with explicit error accounting, so every
returned interval provably contains the true value.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Callable, Tuple, Union

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction]

# Guard bits added on top of the bits implied by the target width
GUARD_BITS = 16


@dataclass(frozen=True)
class CertifiedInterval:
    """
    Closed interval [lo, hi] with rational endpoints.

    Every arithmetic operation returns an enclosure of the exact result.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"Interval endpoints out of order: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: RationalLike) -> "CertifiedInterval":
        return cls(Fraction(value), Fraction(value))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def sign(self) -> int:
        """Sign of every point in the interval, or 0 when the interval meets zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def round_outward(self, bits: int) -> "CertifiedInterval":
        """Widen to dyadic endpoints with `bits` fractional bits."""
        scale = 1 << bits
        lo = (self.lo.numerator * scale) // self.lo.denominator
        hi = -((-self.hi.numerator * scale) // self.hi.denominator)
        return CertifiedInterval(Fraction(lo, scale), Fraction(hi, scale))

    def __add__(self, other):
        other = _as_interval(other)
        return CertifiedInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) + (-self)

    def __mul__(self, other):
        other = _as_interval(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return CertifiedInterval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedInterval":
        if not self.excludes_zero():
            raise ZeroDivisionError(f"Reciprocal of interval containing zero: {self}")
        return CertifiedInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * _as_interval(other).reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("Only integer powers are supported")
        if k < 0:
            return (self ** (-k)).reciprocal()
        if k == 0:
            return CertifiedInterval.point(1)
        lo_k, hi_k = self.lo ** k, self.hi ** k
        if k % 2 == 1 or self.lo >= 0:
            return CertifiedInterval(min(lo_k, hi_k), max(lo_k, hi_k))
        if self.hi <= 0:
            return CertifiedInterval(hi_k, lo_k)
        return CertifiedInterval(Fraction(0), max(lo_k, hi_k))

    def as_floats(self) -> Tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __str__(self):
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _as_interval(value) -> CertifiedInterval:
    if isinstance(value, CertifiedInterval):
        return value
    return CertifiedInterval.point(Fraction(value))


def bits_for_width(width: Fraction) -> int:
    """Smallest b (up to one bit) with 2^-b <= width."""
    width = Fraction(width)
    if width <= 0:
        raise ValueError(f"Target width must be positive, got {width}")
    return max(1, width.denominator.bit_length() - width.numerator.bit_length() + 1)


def _refine(build: Callable[[int], CertifiedInterval], width: Fraction, bits: int) -> CertifiedInterval:
    """Call build(bits), doubling bits until the enclosure is narrow enough."""
    while True:
        enclosure = build(bits)
        if enclosure.width <= width:
            return enclosure
        logger.debug("enclosure width %.3e above target, raising to %d bits", float(enclosure.width), 2 * bits)
        bits *= 2


def _exp_fixed(r: Fraction, halvings: int, bits: int) -> CertifiedInterval:
    y = r / (1 << halvings)
    a, b = y.numerator, y.denominator
    one = 1 << bits

    total = one
    term = one
    k = 0
    while True:
        k += 1
        term = (term * a) // (b * k)
        total += term
        if abs(term) <= 1:
            break
    # each truncated term is off by at most 2 units; the discarded tail by 6
    error = 2 * k + 6
    lo, hi = total - error, total + error

    for _ in range(halvings):
        lo = (lo * lo) >> bits
        hi = -((-hi * hi) >> bits)
    return CertifiedInterval(Fraction(lo, one), Fraction(hi, one))


def exp_enclosure(r: RationalLike, target_width: RationalLike) -> CertifiedInterval:
    """
    Certified enclosure of e^r.

    Parameters:
    -----------
    r : Fraction
        Exact rational exponent
    target_width : Fraction
        Maximal width hi - lo of the returned interval

    Returns:
    --------
    CertifiedInterval
        Interval containing e^r with width <= target_width

    Notes:
    ------
    The argument is reduced to |r/2^m| <= 1/2, the Taylor series is summed
    in fixed point with an explicit remainder bound, and the result is
    squared m times with outward rounding.
    """
    r = Fraction(r)
    target_width = Fraction(target_width)
    if target_width <= 0:
        raise ValueError(f"Target width must be positive, got {target_width}")
    if r == 0:
        return CertifiedInterval.point(1)

    halvings = 0
    while abs(r) > Fraction(1 << halvings, 2):
        halvings += 1

    growth = int(abs(r) * 3 / 2) + 1 if r > 0 else 0
    bits = max(64, bits_for_width(target_width) + 2 * halvings + growth + GUARD_BITS)
    return _refine(lambda p: _exp_fixed(r, halvings, p), target_width, bits)


def exp_interval(argument: CertifiedInterval, target_width: RationalLike) -> CertifiedInterval:
    """Enclosure of {e^s : s in argument}, using monotonicity of exp."""
    width = Fraction(target_width) / 2
    lower = exp_enclosure(argument.lo, width).lo
    upper = exp_enclosure(argument.hi, width).hi
    return CertifiedInterval(lower, upper)


def _arctan_inverse_fixed(x: int, one: int) -> Tuple[int, int]:
    """arctan(1/x) * one and an error bound in units, for integer x >= 2."""
    x2 = x * x
    power = one // x
    total = power
    error = 1
    k = 0
    while power:
        k += 1
        power //= x2
        summand = power // (2 * k + 1)
        total += -summand if k % 2 else summand
        error += 2
    return total, error + 1


@lru_cache(maxsize=64)
def _pi_fixed(bits: int) -> CertifiedInterval:
    one = 1 << bits
    a5, e5 = _arctan_inverse_fixed(5, one)
    a239, e239 = _arctan_inverse_fixed(239, one)
    centre = 16 * a5 - 4 * a239
    error = 16 * e5 + 4 * e239
    return CertifiedInterval(Fraction(centre - error, one), Fraction(centre + error, one))


def pi_enclosure(target_width: RationalLike) -> CertifiedInterval:
    """Certified enclosure of pi from Machin's arctangent formula (cached per precision)."""
    target_width = Fraction(target_width)
    return _refine(_pi_fixed, target_width, max(64, bits_for_width(target_width) + GUARD_BITS))


@lru_cache(maxsize=64)
def _sqrt_pi_fixed(bits: int) -> CertifiedInterval:
    enclosure = _pi_fixed(bits + 8)
    scale = 1 << bits
    lo_sq = (enclosure.lo.numerator * scale * scale) // enclosure.lo.denominator
    hi_sq = -((-enclosure.hi.numerator * scale * scale) // enclosure.hi.denominator)
    return CertifiedInterval(Fraction(isqrt(lo_sq), scale), Fraction(isqrt(hi_sq) + 1, scale))


def pi_power_enclosure(p: int, target_width: RationalLike) -> CertifiedInterval:
    """Certified enclosure of pi^(p/2) for integer p."""
    target_width = Fraction(target_width)
    if p == 0:
        return CertifiedInterval.point(1)
    extra = 2 * abs(p) + 8

    def build(bits: int) -> CertifiedInterval:
        return _sqrt_pi_fixed(bits) ** p

    return _refine(build, target_width, max(64, bits_for_width(target_width) + extra + GUARD_BITS))


def _atanh_fixed(u: Fraction, one: int) -> Tuple[int, int]:
    """atanh(u) * one and an error bound in units, for |u| <= 1/3."""
    a, b = u.numerator, u.denominator
    a2, b2 = a * a, b * b
    power = (one * a) // b
    total = power
    error = 1
    j = 0
    while power not in (0, -1):
        j += 1
        power = (power * a2) // b2
        total += power // (2 * j + 1)
        error += 3
    return total, error + 2


def _log_fixed(x: Fraction, bits: int) -> CertifiedInterval:
    one = 1 << bits
    k = x.numerator.bit_length() - x.denominator.bit_length()
    y = x / Fraction(2) ** k
    while y > Fraction(4, 3):
        y /= 2
        k += 1
    while y < Fraction(2, 3):
        y *= 2
        k -= 1

    ln2, ln2_error = _atanh_fixed(Fraction(1, 3), one)
    lny, lny_error = _atanh_fixed((y - 1) / (y + 1), one)
    centre = 2 * (k * ln2 + lny)
    error = 2 * (abs(k) * ln2_error + lny_error)
    return CertifiedInterval(Fraction(centre - error, one), Fraction(centre + error, one))


def log_enclosure(x: RationalLike, target_width: RationalLike) -> CertifiedInterval:
    """
    Certified enclosure of the natural logarithm of a positive rational.

    ln x = k ln 2 + 2 atanh((y - 1)/(y + 1)) with y = x / 2^k in [2/3, 4/3].
    """
    x = Fraction(x)
    target_width = Fraction(target_width)
    if x <= 0:
        raise ValueError(f"Logarithm needs a positive argument, got {x}")
    if x == 1:
        return CertifiedInterval.point(0)
    magnitude = abs(x.numerator.bit_length() - x.denominator.bit_length()).bit_length()
    bits = max(64, bits_for_width(target_width) + magnitude + GUARD_BITS)
    return _refine(lambda p: _log_fixed(x, p), target_width, bits)
