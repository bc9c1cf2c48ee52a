"""
Tests for exact differentiation, evaluation and sign counting.
"""

from fractions import Fraction

import numpy as np
import pytest
import sympy
from mpmath import mp

from scripts.errors import NonRepresentablePoint, PoleOnRealLine, PrecisionExhausted
from scripts.exact_core import (
    X,
    ExpPolySum,
    LogCombination,
    PolynomialExact,
    RationalFunctionExact,
    SymbolicValue,
    count_alternations,
    count_roots_between,
    count_sign_changes_exact,
    diff_exppoly,
    diff_rational,
    eval_exact,
    inverse_laplace_rational,
    isolate_real_roots,
    sign_certified,
    sign_changes_lower_bound,
    sturm_chain,
)
from scripts.examples import (
    example_61_density,
    example_61_sympy_transform,
    example_63_density,
    example_65_function,
)


# ---------------------------------------------------------------------------
# Exponential-polynomial sums
# ---------------------------------------------------------------------------

def test_second_derivative_of_first_counterexample_at_quarter_points():
    f2 = diff_exppoly(example_61_density(), 2)
    s = Fraction(83521, 2332800000)
    assert eval_exact(f2, Fraction(1, 4)) == SymbolicValue(
        ((-38168123 * s, Fraction(-17, 4), 0), (-92032 * s, Fraction(-1, 2), 0)))
    assert eval_exact(f2, Fraction(1, 2)) == SymbolicValue(
        ((271849000 * s, Fraction(-17, 2), 0), (-64000 * s, -1, 0)))
    assert eval_exact(f2, Fraction(3, 4)) == SymbolicValue(
        ((1787319463 * s, Fraction(-51, 4), 0), (-24448 * s, Fraction(-3, 2), 0)))


def test_signs_alternate_and_give_four_sign_changes():
    f2 = diff_exppoly(example_61_density(), 2)
    signs = [sign_certified(eval_exact(f2, x)) for x in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))]
    assert signs == [-1, 1, -1]
    samples = [Fraction(1, 100), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(100)]
    assert sign_changes_lower_bound(f2, samples) >= 4


def test_eighth_derivative_of_half_integer_density():
    f8 = diff_exppoly(example_63_density(), 8)
    value = eval_exact(f8, 4)
    assert value == SymbolicValue(((Fraction(-11598375, 67108864), -4, -1),))
    assert sign_certified(value) == -1


def test_irrational_powers_are_not_representable():
    with pytest.raises(NonRepresentablePoint):
        eval_exact(example_63_density(), 2)


def test_piece_boundary_is_not_representable():
    with pytest.raises(NonRepresentablePoint):
        eval_exact(example_61_density(), 0)


def test_points_outside_support_evaluate_to_zero():
    assert eval_exact(example_61_density(), -1).is_zero


def test_derivative_of_zero_order_is_identity_and_negative_order_rejected():
    f = example_61_density()
    assert diff_exppoly(f, 0) == f
    with pytest.raises(ValueError):
        diff_exppoly(f, -1)


def test_partial_fraction_inverse_matches_displayed_density():
    z = sympy.Symbol("z")
    assert inverse_laplace_rational(example_61_sympy_transform(z), z) == example_61_density()


def test_inverse_of_simple_pole():
    z = sympy.Symbol("z")
    f = inverse_laplace_rational(3 / (z + 2) ** 2, z)
    assert f == ExpPolySum.on_half_line([(3, 1, -2)])


def test_symbolic_values_cancel_structurally():
    value = SymbolicValue(((Fraction(1, 3), 1, 0),)) - SymbolicValue(((Fraction(1, 3), 1, 0),))
    assert value.is_zero
    assert sign_certified(value) == 0
    assert sign_certified(SymbolicValue.rational(Fraction(-1, 7))) == -1


def test_sign_certification_exhausts_precision_for_tiny_values():
    with pytest.raises(PrecisionExhausted):
        sign_certified(SymbolicValue(((1, -200, 0),)), ceiling_digits=48)


def test_close_values_are_separated_by_the_ladder():
    # e - 2718281828459045/10^15 is about 2.35e-16
    value = SymbolicValue(((1, 1, 0), (Fraction(-2718281828459045, 10 ** 15), 0, 0)))
    assert sign_certified(value) == 1


def test_count_alternations_skips_zeros():
    assert count_alternations([1, 0, -1, -1, 0, 1]) == 2
    assert count_alternations([0, 0]) == 0


def test_log_combination_merges_and_drops_trivial_logs():
    combination = LogCombination(Fraction(1, 2), ((1, 2), (1, 2), (5, 1)))
    assert combination.logs == ((Fraction(2), Fraction(2)),)
    assert not combination.is_rational
    assert (combination - combination).is_rational
    with pytest.raises(ValueError):
        LogCombination(0, ((1, 0),))


# ---------------------------------------------------------------------------
# Rational functions and Sturm sequences
# ---------------------------------------------------------------------------

def _sympy_sign_changes(expr) -> int:
    numerator, _ = sympy.fraction(sympy.cancel(sympy.together(expr)))
    _, factors = sympy.Poly(numerator, X).sqf_list()
    return sum(factor.count_roots() for factor, multiplicity in factors if multiplicity % 2 == 1)


def test_diff_rational_agrees_with_sympy():
    f = RationalFunctionExact.from_exprs(X + 2, (1 + X ** 2) * (9 + X ** 2))
    expr = (X + 2) / ((1 + X ** 2) * (9 + X ** 2))
    for n in (1, 2, 3):
        derivative = diff_rational(f, n)
        candidate = derivative.numerator.poly.as_expr() / derivative.denominator.poly.as_expr()
        assert sympy.cancel(candidate - sympy.diff(expr, X, n)) == 0


def test_diff_rational_matches_repeated_quotient_rule():
    f = example_65_function()
    assert diff_rational(f, 2) == f.derivative().derivative()


def test_low_order_sign_changes_agree_with_sympy():
    f = example_65_function()
    expr = 1 / ((1 + X ** 2) * (9 + X ** 2) * (16 + X ** 2))
    for n in range(1, 5):
        assert count_sign_changes_exact(diff_rational(f, n)) == _sympy_sign_changes(sympy.diff(expr, X, n))
    assert count_sign_changes_exact(diff_rational(f, 1)) == 1


def test_sign_changes_of_monomials_and_even_factors():
    one = PolynomialExact((1,))
    assert count_sign_changes_exact(RationalFunctionExact(PolynomialExact.from_expr(X ** 3), one)) == 1
    assert count_sign_changes_exact(RationalFunctionExact(PolynomialExact.from_expr(X ** 2), one)) == 0
    assert count_sign_changes_exact(RationalFunctionExact(PolynomialExact.from_expr(X ** 4 - 5 * X ** 2 + 4), one)) == 4
    assert count_sign_changes_exact(RationalFunctionExact(PolynomialExact.from_expr((X - 1) ** 2 * (X + 3)), one)) == 1


def test_pole_on_real_line_is_rejected():
    f = RationalFunctionExact.from_exprs(1, X ** 2 - 1)
    with pytest.raises(PoleOnRealLine):
        count_sign_changes_exact(f)


def test_root_isolation_reports_multiplicity():
    p = PolynomialExact.from_expr((X - 1) ** 2 * (X + 2) * (X ** 2 - 2))
    roots = isolate_real_roots(p, width=Fraction(1, 1000))
    assert len(roots) == 4
    assert sorted(r.multiplicity for r in roots) == [1, 1, 1, 2]
    assert any(r.contains(Fraction(-2)) for r in roots)
    assert any(r.contains(Fraction(1)) and r.multiplicity == 2 for r in roots)
    sqrt2 = [r for r in roots if r.lo > 0 and r.lo ** 2 <= 2 <= r.hi ** 2]
    assert len(sqrt2) == 1 and sqrt2[0].hi - sqrt2[0].lo <= Fraction(1, 1000)


def test_zero_polynomial_cannot_be_isolated():
    with pytest.raises(ValueError):
        isolate_real_roots(PolynomialExact())


def test_sturm_counts_on_intervals():
    chain = sturm_chain(sympy.Poly(X ** 3 - X, X))
    assert count_roots_between(chain, -2, 2) == 3
    assert count_roots_between(chain, Fraction(1, 2), 2) == 1
    assert count_roots_between(chain, float("-inf"), float("inf")) == 3


@pytest.mark.slow
def test_fifty_seventh_derivative_has_sixty_one_sign_changes():
    assert count_sign_changes_exact(diff_rational(example_65_function(), 57)) == 61


def test_default_isolation_is_tight_around_square_roots():
    roots = isolate_real_roots(PolynomialExact.from_expr(X ** 2 - 2))
    assert len(roots) == 2
    negative, positive = roots
    assert negative.hi < 0 < positive.lo
    assert positive.lo ** 2 < 2 < positive.hi ** 2
    assert negative.hi ** 2 < 2 < negative.lo ** 2
    assert all(r.hi - r.lo <= Fraction(1, 64) for r in roots)


def test_root_on_the_bound_is_still_isolated():
    # Fujiwara's bound is attained by x - 2
    (root,) = isolate_real_roots(PolynomialExact.from_expr(X - 2))
    assert root.contains(Fraction(2))


# ---------------------------------------------------------------------------
# Randomised identities and cross-checks
# ---------------------------------------------------------------------------

def _random_fraction(rng, numerator_range, max_denominator=6):
    numerator = 0
    while numerator == 0:
        numerator = int(rng.integers(-numerator_range, numerator_range + 1))
    return Fraction(numerator, int(rng.integers(1, max_denominator + 1)))


def _random_exppoly(rng) -> ExpPolySum:
    terms = []
    for _ in range(int(rng.integers(1, 5))):
        power = [Fraction(0), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 2)][int(rng.integers(0, 5))]
        rate = Fraction(int(rng.integers(-6, 3)), int(rng.integers(1, 4)))
        terms.append((_random_fraction(rng, 9), power, rate, int(rng.integers(-1, 2))))
    return ExpPolySum.on_half_line(terms)


def _random_polynomial(rng, degree, bound=9) -> PolynomialExact:
    coefficients = [Fraction(int(c)) for c in rng.integers(-bound, bound + 1, size=degree)]
    return PolynomialExact(tuple(coefficients) + (_random_fraction(rng, bound, 1),))


def _random_rational(rng) -> RationalFunctionExact:
    return RationalFunctionExact(_random_polynomial(rng, int(rng.integers(0, 4))),
                                 _random_polynomial(rng, int(rng.integers(1, 4))))


def _combine(a, f: RationalFunctionExact, b, g: RationalFunctionExact) -> RationalFunctionExact:
    numerator = f.numerator * g.denominator * a + g.numerator * f.denominator * b
    return RationalFunctionExact(numerator, f.denominator * g.denominator)


@pytest.mark.parametrize("seed", range(8))
def test_exppoly_differentiation_is_linear_and_composes(seed):
    rng = np.random.default_rng(seed)
    f, g = _random_exppoly(rng), _random_exppoly(rng)
    a, b = _random_fraction(rng, 7), _random_fraction(rng, 7)
    m, n = int(rng.integers(0, 4)), int(rng.integers(0, 4))
    combined = f.scale(a) + g.scale(b)
    assert diff_exppoly(combined, n) == diff_exppoly(f, n).scale(a) + diff_exppoly(g, n).scale(b)
    assert diff_exppoly(diff_exppoly(f, m), n) == diff_exppoly(f, m + n)


@pytest.mark.parametrize("seed", range(8))
def test_rational_differentiation_is_linear_and_composes(seed):
    rng = np.random.default_rng(100 + seed)
    f, g = _random_rational(rng), _random_rational(rng)
    a, b = _random_fraction(rng, 7), _random_fraction(rng, 7)
    m, n = int(rng.integers(0, 3)), int(rng.integers(1, 3))
    assert diff_rational(_combine(a, f, b, g), n) == _combine(a, diff_rational(f, n), b, diff_rational(g, n))
    assert diff_rational(diff_rational(f, m), n) == diff_rational(f, m + n)


@pytest.mark.parametrize("seed", range(20))
def test_root_isolation_matches_mpmath_roots(seed):
    rng = np.random.default_rng(200 + seed)
    degree = int(rng.integers(1, 13))
    coefficients = [int(c) for c in rng.integers(-20, 21, size=degree + 1)]
    if coefficients[-1] == 0:
        coefficients[-1] = 1
    p = PolynomialExact(tuple(Fraction(c) for c in coefficients))
    if any(m > 1 for _, m in p.poly.sqf_list()[1]):
        pytest.skip("repeated factor")
    intervals = isolate_real_roots(p)
    with mp.workdps(80):
        roots = mp.polyroots(list(reversed(coefficients)), maxsteps=500, extraprec=400)
        real = sorted(mp.re(z) for z in roots if abs(mp.im(z)) < mp.mpf(10) ** -30)
        assert len(intervals) == len(real)
        for interval, root in zip(intervals, real):
            lo = mp.mpf(interval.lo.numerator) / interval.lo.denominator
            hi = mp.mpf(interval.hi.numerator) / interval.hi.denominator
            assert lo - mp.mpf(10) ** -40 <= root <= hi + mp.mpf(10) ** -40


@pytest.mark.parametrize("seed", range(10))
def test_root_isolation_of_products_of_known_roots(seed):
    rng = np.random.default_rng(300 + seed)
    candidates = rng.choice(np.arange(-24, 25), size=int(rng.integers(1, 7)), replace=False)
    known = sorted(Fraction(int(k), 4) for k in candidates)
    multiplicities = [int(m) for m in rng.integers(1, 3, size=len(known))]
    expr = (X ** 2 + 1) ** int(rng.integers(0, 2))
    for root, multiplicity in zip(known, multiplicities):
        expr *= (X - sympy.Rational(root.numerator, root.denominator)) ** multiplicity
    intervals = isolate_real_roots(PolynomialExact.from_expr(expr))
    assert len(intervals) == len(known)
    for interval, root, multiplicity in zip(intervals, known, multiplicities):
        assert interval.contains(root) and interval.multiplicity == multiplicity


@pytest.mark.parametrize("seed", range(12))
def test_sign_changes_of_random_quotients_match_grid_scan(seed):
    rng = np.random.default_rng(400 + seed)
    candidates = rng.choice(np.arange(-20, 21), size=int(rng.integers(0, 6)), replace=False)
    known = [Fraction(int(k), 2) for k in candidates]
    multiplicities = [int(m) for m in rng.integers(1, 4, size=len(known))]
    numerator = sympy.Integer(int(rng.integers(1, 6))) * (X ** 2 + 2) ** int(rng.integers(0, 2))
    for root, multiplicity in zip(known, multiplicities):
        numerator *= (X - sympy.Rational(root.numerator, root.denominator)) ** multiplicity
    denominator = sympy.Integer(1)
    for c in rng.integers(1, 10, size=int(rng.integers(1, 3))):
        denominator *= X ** 2 + int(c)
    f = RationalFunctionExact.from_exprs(sympy.expand(numerator), sympy.expand(denominator))

    # grid points sit between consecutive half-integers
    grid = [Fraction(2 * k + 1, 4) for k in range(-44, 44)]
    scanned = count_alternations((f(x) > 0) - (f(x) < 0) for x in grid)
    expected = sum(m % 2 for m in multiplicities)
    assert scanned == expected
    assert count_sign_changes_exact(f) == expected


@pytest.mark.parametrize("seed", range(25))
def test_certified_signs_match_high_precision_reference(seed):
    rng = np.random.default_rng(500 + seed)
    terms = tuple(
        (_random_fraction(rng, 30, 9), Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5))),
         int(rng.integers(-3, 4)))
        for _ in range(int(rng.integers(1, 5)))
    )
    value = SymbolicValue(terms)
    if seed % 2:
        # subtract a decimal truncation to leave a value of order 10^-digits
        digits = int(rng.integers(10, 80))
        with mp.workdps(300):
            approximation = Fraction(int(mp.floor(value.to_mpf(300) * mp.mpf(10) ** digits)), 10 ** digits)
        value = value - SymbolicValue.rational(approximation)
    reference = value.to_mpf(300)
    expected = (reference > 0) - (reference < 0)
    assert sign_certified(value) == expected
