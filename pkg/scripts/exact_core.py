"""
Exact Core Module

Exact calculus over exponential-polynomial sums and rational functions with
arbitrary-precision rational coefficients: differentiation, evaluation to
symbolic values, certified sign determination, Sturm-sequence root
isolation and exact sign-change counting.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from mpmath import mp
from sympy import Poly, integer_nthroot

from .errors import NonRepresentablePoint, PoleOnRealLine, PrecisionExhausted
from .intervals import (
    CertifiedInterval,
    exp_enclosure,
    log_enclosure,
    pi_power_enclosure,
)

logger = logging.getLogger(__name__)

Rational = Fraction
Endpoint = Union[Fraction, float]

X = sympy.Symbol("x")

# Precision ladder for sign_certified, in decimal digits of enclosure width
LADDER_START_DIGITS = 12
LADDER_FACTOR = 4
LADDER_CEILING_DIGITS = 400

# Root isolation: grid of the rational root bound, default bisections per interval
ROOT_BOUND_SCALE = 64
ISOLATION_BISECTIONS = 8


def to_sympy_rational(value: Fraction) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy_rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def fraction_to_mpf(value):
    """mpmath number from a Fraction, int or infinite float endpoint."""
    if isinstance(value, float) and math.isinf(value):
        return mp.inf if value > 0 else -mp.inf
    value = Fraction(value)
    return mp.mpf(value.numerator) / value.denominator


def count_alternations(signs: Iterable[int]) -> int:
    """Number of strict sign alternations in a sequence, zeros skipped."""
    changes = 0
    previous = 0
    for sign in signs:
        if sign == 0:
            continue
        if previous and sign != previous:
            changes += 1
        previous = sign
    return changes


# ---------------------------------------------------------------------------
# Symbolic values and exact constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicValue:
    """
    Exact value sum(q * e^r * pi^(p/2)) over (q, r, p) triples.

    Terms with equal (r, p) are merged and zero coefficients dropped, so the
    empty tuple is exactly zero and equality is structural.
    """

    terms: Tuple[Tuple[Fraction, Fraction, int], ...] = ()

    def __post_init__(self):
        merged: Dict[Tuple[Fraction, int], Fraction] = {}
        for q, r, p in self.terms:
            key = (Fraction(r), int(p))
            merged[key] = merged.get(key, Fraction(0)) + Fraction(q)
        canonical = tuple(
            (q, r, p) for (r, p), q in sorted(merged.items()) if q != 0
        )
        object.__setattr__(self, "terms", canonical)

    @classmethod
    def zero(cls) -> "SymbolicValue":
        return cls(())

    @classmethod
    def rational(cls, q) -> "SymbolicValue":
        return cls(((Fraction(q), Fraction(0), 0),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, r, p: int = 0) -> Fraction:
        for q, rate, power in self.terms:
            if rate == Fraction(r) and power == p:
                return q
        return Fraction(0)

    def __add__(self, other: "SymbolicValue") -> "SymbolicValue":
        return SymbolicValue(self.terms + other.terms)

    def __neg__(self) -> "SymbolicValue":
        return SymbolicValue(tuple((-q, r, p) for q, r, p in self.terms))

    def __sub__(self, other: "SymbolicValue") -> "SymbolicValue":
        return self + (-other)

    def scale(self, factor) -> "SymbolicValue":
        factor = Fraction(factor)
        return SymbolicValue(tuple((q * factor, r, p) for q, r, p in self.terms))

    def __mul__(self, other):
        if not isinstance(other, SymbolicValue):
            return self.scale(other)
        return SymbolicValue(tuple(
            (q1 * q2, r1 + r2, p1 + p2)
            for q1, r1, p1 in self.terms
            for q2, r2, p2 in other.terms
        ))

    __rmul__ = __mul__

    def enclosure(self, width) -> CertifiedInterval:
        """Certified interval of total width <= width containing the value."""
        width = Fraction(width)
        if self.is_zero:
            return CertifiedInterval.point(0)
        share = width / (2 * len(self.terms))
        while True:
            total = CertifiedInterval.point(0)
            for q, r, p in self.terms:
                exp_bound = 2 ** (math.ceil(float(r) * 1.45) + 1) if r > 0 else 1
                pi_bound = 2 ** abs(p)
                term_width = share / (abs(q) * (exp_bound + pi_bound + 1))
                term = exp_enclosure(r, term_width) * pi_power_enclosure(p, term_width) * q
                total = total + term
            if total.width <= width:
                return total
            share /= 4

    def to_mpf(self, dps: int = 50):
        with mp.workdps(dps):
            return mp.fsum(
                mp.mpf(q.numerator) / q.denominator
                * mp.exp(mp.mpf(r.numerator) / r.denominator)
                * mp.pi ** (mp.mpf(p) / 2)
                for q, r, p in self.terms
            )

    def __float__(self):
        return float(self.to_mpf(30))

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for q, r, p in self.terms:
            factors = [str(q)]
            if r != 0:
                factors.append(f"e^({r})")
            if p != 0:
                factors.append(f"pi^({Fraction(p, 2)})")
            parts.append("*".join(factors))
        return " + ".join(parts)


@dataclass(frozen=True)
class LogCombination:
    """
    Exact constant q0 + sum(q_i * ln r_i) with rational q_i and r_i > 0.

    Arguments are stored as r_i > 1 (ln r = -ln(1/r)) so that cancelling
    combinations compare equal to their rational part.
    """

    rational: Fraction = Fraction(0)
    logs: Tuple[Tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rational", Fraction(self.rational))
        merged: Dict[Fraction, Fraction] = {}
        for coefficient, argument in self.logs:
            argument = Fraction(argument)
            if argument <= 0:
                raise ValueError(f"Logarithm of non-positive rational {argument}")
            if argument == 1:
                continue
            coefficient = Fraction(coefficient)
            if argument < 1:
                argument, coefficient = 1 / argument, -coefficient
            merged[argument] = merged.get(argument, Fraction(0)) + coefficient
        object.__setattr__(self, "logs", tuple(
            (c, a) for a, c in sorted(merged.items()) if c != 0
        ))

    @classmethod
    def coerce(cls, value) -> "LogCombination":
        if isinstance(value, LogCombination):
            return value
        return cls(Fraction(value))

    @property
    def is_rational(self) -> bool:
        return not self.logs

    def __add__(self, other):
        other = LogCombination.coerce(other)
        return LogCombination(self.rational + other.rational, self.logs + other.logs)

    __radd__ = __add__

    def __neg__(self):
        return LogCombination(-self.rational, tuple((-c, a) for c, a in self.logs))

    def __sub__(self, other):
        return self + (-LogCombination.coerce(other))

    def scale(self, factor) -> "LogCombination":
        factor = Fraction(factor)
        return LogCombination(self.rational * factor, tuple((c * factor, a) for c, a in self.logs))

    def to_mpf(self, dps: int = 30):
        with mp.workdps(dps):
            value = mp.mpf(self.rational.numerator) / self.rational.denominator
            for coefficient, argument in self.logs:
                value += (mp.mpf(coefficient.numerator) / coefficient.denominator) * mp.log(
                    mp.mpf(argument.numerator) / argument.denominator
                )
            return value

    def enclosure(self, width) -> CertifiedInterval:
        width = Fraction(width)
        total = CertifiedInterval.point(self.rational)
        for coefficient, argument in self.logs:
            total = total + log_enclosure(argument, width / (len(self.logs) * abs(coefficient))) * coefficient
        return total

    def __float__(self):
        return float(self.to_mpf())

    def __str__(self):
        parts = [str(self.rational)] if self.rational or not self.logs else []
        parts += [f"{c}*ln({a})" for c, a in self.logs]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Exponential-polynomial sums
# ---------------------------------------------------------------------------

def _rational_power(x: Fraction, beta: Fraction) -> Fraction:
    if beta.denominator == 1:
        if x == 0 and beta < 0:
            raise NonRepresentablePoint(f"0^{beta} is a pole")
        return x ** int(beta)
    if x < 0:
        raise NonRepresentablePoint(f"{x}^{beta} is not real")
    if x == 0:
        if beta > 0:
            return Fraction(0)
        raise NonRepresentablePoint(f"0^{beta} is a pole")
    num_root, num_exact = integer_nthroot(x.numerator, beta.denominator)
    den_root, den_exact = integer_nthroot(x.denominator, beta.denominator)
    if not (num_exact and den_exact):
        raise NonRepresentablePoint(f"{x}^{beta} is not rational")
    return Fraction(int(num_root), int(den_root)) ** beta.numerator


@dataclass(frozen=True)
class ExpPolyTerm:
    """Term coefficient * x^power * e^(rate*x) * pi^(pi_power/2)."""

    coefficient: Fraction
    power: Fraction
    rate: Fraction
    pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "power", Fraction(self.power))
        object.__setattr__(self, "rate", Fraction(self.rate))
        object.__setattr__(self, "pi_power", int(self.pi_power))
        if self.coefficient == 0:
            raise ValueError("ExpPolyTerm coefficient must be non-zero")

    @property
    def key(self) -> Tuple[Fraction, Fraction, int]:
        return (self.power, self.rate, self.pi_power)

    def derivative(self) -> List["ExpPolyTerm"]:
        result = []
        if self.power != 0:
            result.append(ExpPolyTerm(self.coefficient * self.power, self.power - 1, self.rate, self.pi_power))
        if self.rate != 0:
            result.append(ExpPolyTerm(self.coefficient * self.rate, self.power, self.rate, self.pi_power))
        return result

    def evaluate(self, x: Fraction) -> SymbolicValue:
        q = self.coefficient * _rational_power(x, self.power)
        return SymbolicValue(((q, self.rate * x, self.pi_power),))

    def to_mpf(self, x):
        return (
            (mp.mpf(self.coefficient.numerator) / self.coefficient.denominator)
            * mp.power(x, mp.mpf(self.power.numerator) / self.power.denominator)
            * mp.exp(mp.mpf(self.rate.numerator) / self.rate.denominator * x)
            * mp.pi ** (mp.mpf(self.pi_power) / 2)
        )


def _merge_terms(terms: Iterable[ExpPolyTerm]) -> Tuple[ExpPolyTerm, ...]:
    merged: Dict[Tuple[Fraction, Fraction, int], Fraction] = {}
    for term in terms:
        merged[term.key] = merged.get(term.key, Fraction(0)) + term.coefficient
    return tuple(
        ExpPolyTerm(c, power, rate, pi_power)
        for (power, rate, pi_power), c in sorted(merged.items())
        if c != 0
    )


def _endpoint(value) -> Endpoint:
    if isinstance(value, float) and math.isinf(value):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class ExpPolyPiece:
    """Terms valid on the open support interval (lo, hi)."""

    lo: Endpoint
    hi: Endpoint
    terms: Tuple[ExpPolyTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", _endpoint(self.lo))
        object.__setattr__(self, "hi", _endpoint(self.hi))
        object.__setattr__(self, "terms", _merge_terms(self.terms))
        if not self.lo < self.hi:
            raise ValueError(f"Empty support ({self.lo}, {self.hi})")

    def derivative(self) -> "ExpPolyPiece":
        return ExpPolyPiece(self.lo, self.hi, tuple(d for t in self.terms for d in t.derivative()))

    def contains(self, x) -> bool:
        return self.lo < x < self.hi


@dataclass(frozen=True)
class ExpPolySum:
    """
    Piecewise exponential-polynomial function.

    Pieces have pairwise disjoint supports; the function is zero outside
    them. Pieces with no terms are dropped so that equality is structural.
    """

    pieces: Tuple[ExpPolyPiece, ...] = ()

    def __post_init__(self):
        pieces = tuple(sorted((p for p in self.pieces if p.terms), key=lambda p: p.lo))
        for left, right in zip(pieces, pieces[1:]):
            if left.hi > right.lo:
                raise ValueError(f"Overlapping supports ({left.lo}, {left.hi}) and ({right.lo}, {right.hi})")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def on_half_line(cls, terms: Iterable[Tuple], lo=Fraction(0)) -> "ExpPolySum":
        """Single piece on (lo, inf) from (coefficient, power, rate[, pi_power]) tuples."""
        return cls((ExpPolyPiece(lo, math.inf, tuple(ExpPolyTerm(*t) for t in terms)),))

    @property
    def is_zero(self) -> bool:
        return not self.pieces

    def derivative(self) -> "ExpPolySum":
        return ExpPolySum(tuple(p.derivative() for p in self.pieces))

    def scale(self, factor) -> "ExpPolySum":
        factor = Fraction(factor)
        if factor == 0:
            return ExpPolySum()
        return ExpPolySum(tuple(
            ExpPolyPiece(p.lo, p.hi, tuple(
                ExpPolyTerm(t.coefficient * factor, t.power, t.rate, t.pi_power) for t in p.terms
            ))
            for p in self.pieces
        ))

    def shift_rates(self, delta) -> "ExpPolySum":
        """Multiply by e^(delta*x)."""
        delta = Fraction(delta)
        return ExpPolySum(tuple(
            ExpPolyPiece(p.lo, p.hi, tuple(
                ExpPolyTerm(t.coefficient, t.power, t.rate + delta, t.pi_power) for t in p.terms
            ))
            for p in self.pieces
        ))

    def __add__(self, other: "ExpPolySum") -> "ExpPolySum":
        endpoints = sorted({e for p in self.pieces + other.pieces for e in (p.lo, p.hi)})
        pieces = []
        for lo, hi in zip(endpoints, endpoints[1:]):
            terms = [
                t
                for p in self.pieces + other.pieces
                if p.lo <= lo and hi <= p.hi
                for t in p.terms
            ]
            if terms:
                pieces.append(ExpPolyPiece(lo, hi, tuple(terms)))
        return ExpPolySum(tuple(pieces))

    def __neg__(self) -> "ExpPolySum":
        return self.scale(-1)

    def __sub__(self, other: "ExpPolySum") -> "ExpPolySum":
        return self + other.scale(-1)

    def piece_at(self, x) -> Optional[ExpPolyPiece]:
        for piece in self.pieces:
            if piece.contains(x):
                return piece
            if x == piece.lo or x == piece.hi:
                raise NonRepresentablePoint(f"x = {x} lies on a piece boundary")
        return None

    def to_mpf(self, x, dps: int = 30):
        with mp.workdps(dps):
            x = fraction_to_mpf(x) if isinstance(x, (Fraction, int)) else mp.mpf(x)
            for piece in self.pieces:
                if fraction_to_mpf(piece.lo) < x < fraction_to_mpf(piece.hi):
                    return mp.fsum(t.to_mpf(x) for t in piece.terms)
            return mp.mpf(0)

    def __str__(self):
        lines = []
        for piece in self.pieces:
            body = " + ".join(
                f"{t.coefficient}*x^({t.power})*e^({t.rate}x)" + (f"*pi^({Fraction(t.pi_power, 2)})" if t.pi_power else "")
                for t in piece.terms
            )
            lines.append(f"on ({piece.lo}, {piece.hi}): {body}")
        return "\n".join(lines) if lines else "0"


def diff_exppoly(f: ExpPolySum, n: int) -> ExpPolySum:
    """
    Exact n-th derivative of an ExpPolySum on the interior of each piece.

    Jumps at piece endpoints are not encoded; callers analyse per piece.
    """
    if n < 0:
        raise ValueError(f"Derivative order must be non-negative, got {n}")
    result = f
    for _ in range(n):
        result = result.derivative()
    return result


def eval_exact(f: ExpPolySum, x) -> SymbolicValue:
    """
    Exact value of f at a rational point as a SymbolicValue.

    Raises NonRepresentablePoint when some x^beta is irrational or x lies on
    a piece boundary. Points outside every support evaluate to zero.
    """
    x = Fraction(x)
    piece = f.piece_at(x)
    if piece is None:
        return SymbolicValue.zero()
    total = SymbolicValue.zero()
    for term in piece.terms:
        total = total + term.evaluate(x)
    return total


def sign_certified(value: SymbolicValue,
                   start_digits: int = LADDER_START_DIGITS,
                   ceiling_digits: int = LADDER_CEILING_DIGITS,
                   factor: int = LADDER_FACTOR) -> int:
    """
    Exact sign of a SymbolicValue.

    Parameters:
    -----------
    value : SymbolicValue
        Value to classify
    start_digits : int, default=12
        First enclosure width is 10^-start_digits
    ceiling_digits : int, default=400
        Precision ceiling; beyond it PrecisionExhausted is raised
    factor : int, default=4
        Multiplier applied to the digit count at each ladder step

    Returns:
    --------
    int
        -1, 0 or +1; zero only for structurally cancelled values
    """
    if value.is_zero:
        return 0
    digits = start_digits
    while True:
        enclosure = value.enclosure(Fraction(1, 10 ** digits))
        if enclosure.excludes_zero():
            logger.debug("sign of %s certified at %d digits", value, digits)
            return enclosure.sign()
        if digits >= ceiling_digits:
            raise PrecisionExhausted(
                f"Enclosure {enclosure} still contains zero at 10^-{ceiling_digits}"
            )
        digits = min(digits * factor, ceiling_digits)


def sign_changes_lower_bound(f: ExpPolySum, sample_points: Sequence) -> int:
    """
    Certified lower bound for the sign changes of f from exact signs at samples.

    Samples must lie inside support pieces; they are visited in increasing
    order and zero signs are skipped.
    """
    points = sorted(Fraction(x) for x in sample_points)
    signs = [sign_certified(eval_exact(f, x)) for x in points]
    return count_alternations(signs)


def inverse_laplace_rational(transform, z: sympy.Symbol) -> ExpPolySum:
    """
    Exact inverse Laplace transform of a proper rational function of z.

    Every partial fraction c/(z + p)^k becomes c x^(k-1)/(k-1)! e^(-p x) on
    (0, inf). Poles must be rational.
    """
    expanded = sympy.apart(sympy.together(transform), z)
    terms = []
    for part in sympy.Add.make_args(expanded):
        numerator, denominator = sympy.fraction(sympy.factor(part))
        if not numerator.is_number:
            raise ValueError(f"Partial fraction {part} is not of the form c/(z+p)^k")
        denominator_poly = Poly(denominator, z)
        if denominator_poly.degree() < 1:
            raise ValueError("Transform is not proper: Dirac components cannot be represented")
        roots = sympy.roots(denominator_poly)
        if len(roots) != 1:
            raise ValueError(f"Partial fraction {part} has more than one pole")
        (root, multiplicity), = roots.items()
        if not root.is_rational:
            raise ValueError(f"Pole {root} is not rational")
        coefficient = from_sympy_rational(numerator / denominator_poly.LC())
        coefficient /= math.factorial(multiplicity - 1)
        terms.append((coefficient, multiplicity - 1, from_sympy_rational(root)))
    return ExpPolySum.on_half_line(terms)


# ---------------------------------------------------------------------------
# Polynomials and rational functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolynomialExact:
    """Polynomial with rational coefficients, lowest degree first."""

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coefficients = [Fraction(c) for c in self.coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def from_poly(cls, poly: Poly) -> "PolynomialExact":
        return cls(tuple(from_sympy_rational(c) for c in reversed(poly.all_coeffs())))

    @classmethod
    def from_expr(cls, expr) -> "PolynomialExact":
        return cls.from_poly(Poly(expr, X, domain="QQ"))

    @cached_property
    def poly(self) -> Poly:
        coefficients = [to_sympy_rational(c) for c in reversed(self.coefficients)] or [0]
        return Poly(coefficients, X, domain="QQ")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        value = Fraction(0)
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def __add__(self, other: "PolynomialExact") -> "PolynomialExact":
        return PolynomialExact.from_poly(self.poly + other.poly)

    def __sub__(self, other: "PolynomialExact") -> "PolynomialExact":
        return PolynomialExact.from_poly(self.poly - other.poly)

    def __mul__(self, other):
        if isinstance(other, PolynomialExact):
            return PolynomialExact.from_poly(self.poly * other.poly)
        return PolynomialExact(tuple(c * Fraction(other) for c in self.coefficients))

    __rmul__ = __mul__

    def derivative(self) -> "PolynomialExact":
        return PolynomialExact(tuple(k * c for k, c in enumerate(self.coefficients))[1:])

    def __str__(self):
        return str(self.poly.as_expr())


@dataclass(frozen=True)
class RootInterval:
    """
    Isolating interval of one distinct real root.

    The root lies in the open interval (lo, hi), or equals lo when lo == hi.
    """

    lo: Fraction
    hi: Fraction
    multiplicity: int

    def contains(self, x) -> bool:
        return self.lo == self.hi == x or self.lo < x < self.hi


@dataclass(frozen=True)
class RationalFunctionExact:
    """
    Quotient of polynomials kept in lowest terms with a monic denominator.
    """

    numerator: PolynomialExact
    denominator: PolynomialExact
    reduced: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if self.denominator.is_zero:
            raise ZeroDivisionError("Denominator of a rational function must be non-zero")
        if self.reduced:
            return
        numerator, denominator = self.numerator.poly, self.denominator.poly
        if numerator.is_zero:
            denominator = Poly(1, X, domain="QQ")
        else:
            common = numerator.gcd(denominator)
            if common.degree() > 0:
                numerator = numerator.exquo(common)
                denominator = denominator.exquo(common)
        lead = denominator.LC()
        object.__setattr__(self, "numerator", PolynomialExact.from_poly(numerator.quo_ground(lead)))
        object.__setattr__(self, "denominator", PolynomialExact.from_poly(denominator.quo_ground(lead)))
        object.__setattr__(self, "reduced", True)

    @classmethod
    def from_exprs(cls, numerator, denominator) -> "RationalFunctionExact":
        return cls(PolynomialExact.from_expr(numerator), PolynomialExact.from_expr(denominator))

    def derivative(self) -> "RationalFunctionExact":
        """First derivative by the quotient rule, reduced afterwards."""
        n, d = self.numerator.poly, self.denominator.poly
        return RationalFunctionExact(
            PolynomialExact.from_poly(n.diff(X) * d - n * d.diff(X)),
            PolynomialExact.from_poly(d * d),
        )

    def __call__(self, x) -> Fraction:
        return self.numerator(x) / self.denominator(x)

    def evaluate_float(self, x: float, dps: int = 50) -> float:
        with mp.workdps(dps):
            point = mp.mpf(x)
            top = mp.polyval([fraction_to_mpf(c) for c in reversed(self.numerator.coefficients)] or [0], point)
            bottom = mp.polyval([fraction_to_mpf(c) for c in reversed(self.denominator.coefficients)], point)
            return float(top / bottom)


def diff_rational(f: RationalFunctionExact, n: int) -> RationalFunctionExact:
    """
    Exact n-th derivative of a rational function in lowest terms.

    Parameters:
    -----------
    f : RationalFunctionExact
        Function N/D
    n : int
        Derivative order

    Returns:
    --------
    RationalFunctionExact
        f^(n) with denominator dividing D^(n+1)

    Notes:
    ------
    Uses f^(k) = P_k / D^(k+1) with P_{k+1} = P_k' D - (k+1) P_k D' over the
    integers, removing the content of P_k at every step; common factors with
    D are cancelled once at the end.
    """
    if n < 0:
        raise ValueError(f"Derivative order must be non-negative, got {n}")
    if n == 0:
        return f

    num_multiplier, numerator = f.numerator.poly.clear_denoms(convert=True)
    den_multiplier, base = f.denominator.poly.clear_denoms(convert=True)
    scale = from_sympy_rational(den_multiplier) / from_sympy_rational(num_multiplier)

    base_derivative = base.diff(X)
    current = numerator
    for k in range(n):
        current = current.diff(X) * base - current.mul_ground(k + 1) * base_derivative
        if current.is_zero:
            return RationalFunctionExact(PolynomialExact(), PolynomialExact((1,)))
        content, current = current.primitive()
        scale *= from_sympy_rational(content)
        logger.debug("diff_rational: order %d, numerator degree %d", k + 1, current.degree())

    denominator = base ** (n + 1)
    if current.gcd(base).degree() > 0:
        common = current.gcd(denominator)
        current = current.exquo(common)
        denominator = denominator.exquo(common)

    numerator_q = current.set_domain("QQ")
    denominator_q = denominator.set_domain("QQ")
    lead = denominator_q.LC()
    numerator_q = numerator_q.mul_ground(to_sympy_rational(scale)).quo_ground(lead)
    denominator_q = denominator_q.quo_ground(lead)
    return RationalFunctionExact(
        PolynomialExact.from_poly(numerator_q),
        PolynomialExact.from_poly(denominator_q),
        reduced=True,
    )


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------

def _integer_primitive(poly: Poly) -> Poly:
    _, integer_poly = poly.clear_denoms(convert=True)
    _, primitive = integer_poly.primitive()
    return primitive


def _coefficient_list(poly: Poly) -> List[int]:
    return [int(c) for c in poly.all_coeffs()]


def sturm_chain(poly: Poly) -> List[List[int]]:
    """
    Sturm sequence of a square-free integer polynomial as coefficient lists.

    Built as a primitive pseudo-remainder sequence; each remainder is
    negated or not so that it is a positive multiple of -rem(p_{i-1}, p_i).
    """
    previous = _integer_primitive(poly)
    current = _integer_primitive(previous.diff(X)) if previous.degree() > 0 else None
    chain = [_coefficient_list(previous)]
    while current is not None and not current.is_zero:
        chain.append(_coefficient_list(current))
        delta = previous.degree() - current.degree()
        remainder = previous.prem(current)
        if remainder.is_zero:
            break
        if current.LC() > 0 or (delta + 1) % 2 == 0:
            remainder = -remainder
        lead_sign = 1 if remainder.LC() > 0 else -1
        _, remainder = remainder.primitive()
        if (remainder.LC() > 0) != (lead_sign > 0):
            remainder = -remainder
        previous, current = current, remainder
        logger.debug("sturm chain: degree %d", current.degree())
    return chain


def _sign_at(coefficients: List[int], value: Fraction) -> int:
    a, b = value.numerator, value.denominator
    acc = coefficients[0]
    b_power = 1
    for c in coefficients[1:]:
        b_power *= b
        acc = acc * a + c * b_power
    return (acc > 0) - (acc < 0)


def _sign_at_infinity(coefficients: List[int], direction: int) -> int:
    sign = 1 if coefficients[0] > 0 else -1
    degree = len(coefficients) - 1
    return sign if direction > 0 or degree % 2 == 0 else -sign


def _variations(chain: List[List[int]], value) -> int:
    if value == math.inf:
        signs = [_sign_at_infinity(c, 1) for c in chain]
    elif value == -math.inf:
        signs = [_sign_at_infinity(c, -1) for c in chain]
    else:
        signs = [_sign_at(c, Fraction(value)) for c in chain]
    return count_alternations(signs)


def count_roots_between(chain: List[List[int]], lo, hi) -> int:
    """Distinct roots in (lo, hi] of the chain's leading polynomial."""
    return _variations(chain, lo) - _variations(chain, hi)


def _root_ceiling(q: Fraction, k: int) -> Fraction:
    """Rational upper bound of q^(1/k) on a grid of step 1/ROOT_BOUND_SCALE."""
    scaled = q * ROOT_BOUND_SCALE ** k
    target = -((-scaled.numerator) // scaled.denominator)
    root, exact = integer_nthroot(target, k)
    return Fraction(int(root) + (0 if exact else 1), ROOT_BOUND_SCALE)


def _root_bound(coefficients: List[int]) -> Fraction:
    """
    Strict bound on the moduli of the roots, from Fujiwara's bound
    2 max |a_{n-k}/a_n|^(1/k) with the constant term halved.
    """
    lead = abs(coefficients[0])
    degree = len(coefficients) - 1
    radii = []
    for k, c in enumerate(coefficients[1:], start=1):
        if c == 0:
            continue
        ratio = Fraction(abs(c), lead)
        if k == degree:
            ratio /= 2
        radii.append(_root_ceiling(ratio, k))
    if not radii:
        return Fraction(1)
    return 2 * max(radii) * Fraction(17, 16)


def _bisect_isolating(coefficients: List[int], a: Fraction, b: Fraction,
                      width: Fraction) -> Tuple[Fraction, Fraction]:
    while b - a > width:
        m = (a + b) / 2
        sign_m = _sign_at(coefficients, m)
        if sign_m == 0:
            return m, m
        if sign_m * _sign_at(coefficients, a) < 0:
            b = m
        else:
            a = m
    return a, b


def _isolate_squarefree(poly: Poly, width: Optional[Fraction]) -> List[Tuple[Fraction, Fraction]]:
    chain = sturm_chain(poly)
    coefficients = chain[0]
    bound = _root_bound(coefficients)
    found = []
    stack = [(-bound, bound, count_roots_between(chain, -bound, bound))]
    while stack:
        a, b, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            found.append((a, b))
            continue
        m = (a + b) / 2
        if _sign_at(coefficients, m) == 0:
            found.append((m, m))
            gap = (b - a) / 4
            while True:
                left, right = m - gap, m + gap
                if (_sign_at(coefficients, left) and _sign_at(coefficients, right)
                        and count_roots_between(chain, left, right) == 1):
                    break
                gap /= 2
            stack.append((a, left, count_roots_between(chain, a, left)))
            stack.append((right, b, count_roots_between(chain, right, b)))
        else:
            stack.append((a, m, count_roots_between(chain, a, m)))
            stack.append((m, b, count_roots_between(chain, m, b)))

    refined = []
    for a, b in found:
        target = width if width is not None else (b - a) / 2 ** ISOLATION_BISECTIONS
        refined.append(_bisect_isolating(coefficients, a, b, target))
    return refined


def isolate_real_roots(p: PolynomialExact, width: Optional[Fraction] = None) -> List[RootInterval]:
    """
    Isolate every distinct real root of p by Sturm sequences.

    Parameters:
    -----------
    p : PolynomialExact
        Non-zero polynomial
    width : Fraction, optional
        If given, every isolating interval is bisected down to this width;
        otherwise each is bisected ISOLATION_BISECTIONS times

    Returns:
    --------
    List[RootInterval]
        Disjoint isolating intervals sorted by position, with multiplicities
        from the square-free factorisation
    """
    if p.is_zero:
        raise ValueError("Cannot isolate the roots of the zero polynomial")
    width = Fraction(width) if width is not None else None
    _, factors = p.poly.sqf_list()
    roots = []
    for factor, multiplicity in factors:
        if factor.degree() < 1:
            continue
        for lo, hi in _isolate_squarefree(factor, width):
            roots.append(RootInterval(lo, hi, multiplicity))
    return sorted(roots, key=lambda r: (r.lo, r.hi))


def _is_even_definite(poly: Poly) -> bool:
    """True when poly(x) = Q(x^2) with all coefficients of one strict sign."""
    coefficients = poly.all_coeffs()[::-1]
    even = coefficients[0::2]
    odd = coefficients[1::2]
    if any(c != 0 for c in odd):
        return False
    return all(c > 0 for c in even) or all(c < 0 for c in even)


def real_root_count(poly: Poly, positive_only: bool = False, odd_only: bool = False) -> int:
    """
    Number of distinct real roots (on (0, inf) when positive_only).

    With odd_only only roots of odd multiplicity are counted.
    """
    _, factors = poly.sqf_list()
    total = 0
    for factor, multiplicity in factors:
        if factor.degree() < 1 or (odd_only and multiplicity % 2 == 0):
            continue
        chain = sturm_chain(factor)
        lower = 0 if positive_only else -math.inf
        # (0, inf] excludes a root at zero
        total += count_roots_between(chain, lower, math.inf)
    return total


def even_part(poly: Poly) -> Optional[Poly]:
    """Q with poly(x) = Q(x^2), or None when poly has odd powers."""
    coefficients = poly.all_coeffs()[::-1]
    if any(c != 0 for c in coefficients[1::2]):
        return None
    return Poly(list(reversed(coefficients[0::2])), X, domain=poly.get_domain())


def count_sign_changes_exact(f: RationalFunctionExact) -> int:
    """
    Exact number of sign changes of a rational function on the real line.

    Equals the number of real roots of the numerator with odd multiplicity.
    A factor x^k contributes one change when k is odd; when the remaining
    numerator is even in x, only positive roots of Q with r(x) = Q(x^2) are
    counted and doubled.
    """
    denominator = f.denominator.poly
    if denominator.degree() > 0 and not _is_even_definite(denominator):
        if real_root_count(denominator) > 0:
            raise PoleOnRealLine("Denominator vanishes on the real line")

    numerator = f.numerator.poly
    if numerator.is_zero:
        return 0
    coefficients = numerator.all_coeffs()[::-1]
    zero_order = next(k for k, c in enumerate(coefficients) if c != 0)
    reduced = Poly(list(reversed(coefficients[zero_order:])), X, domain=numerator.get_domain())
    changes = zero_order % 2

    squared = even_part(reduced)
    if squared is not None:
        logger.info("even reduction: counting positive roots of a degree %d polynomial", squared.degree())
        changes += 2 * real_root_count(_integer_primitive(squared), positive_only=True, odd_only=True)
    else:
        changes += real_root_count(_integer_primitive(reduced), odd_only=True)
    return changes
