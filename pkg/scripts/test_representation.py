"""
Tests for the exponential representation: level crossing, decomposition,
transforms of representations, Polya factors and Levy densities.
"""

import math
from fractions import Fraction
from typing import List, Tuple

import numpy as np
import pytest
import sympy

from scripts.errors import LevelCrossingViolated, NotExpRepresentable, PoleHit
from scripts.exact_core import ExpPolySum, LogCombination, count_alternations
from scripts.examples import (
    example_61_phi,
    example_61_representation,
    example_61_transform,
    example_63_representation,
    example_63_transform,
    two_pole_phi,
)
from scripts.representation import (
    INF,
    BellRepresentation,
    ExpOverX,
    PhiFunction,
    PolyaParams,
    PowerLaw,
    StepPiece,
    StieltjesData,
    check_level_crossing,
    check_tail_integrability,
    decompose_phi,
    levy_density_exp_form,
    nevanlinna_pick_holds,
    nu_from_phi,
    phi_from_interlacing_rational,
    phi_from_nu,
    polya_phi,
    polya_phi_moment,
    polya_transform,
    representation_from_interlacing_rational,
    split_representation,
    stieltjes_eval,
    stieltjes_from_partial_fractions,
    stieltjes_side_transform,
    transform_from_representation,
    truncated_laplace,
)
from scripts.transforms import gaussian_transform, rational_transform

IDENTITY_POINTS = [-7.0, -2.5, -0.5, 0.25, 1.0, 3.0, 9.5]


def _random_monotone_phi(rng: np.random.Generator) -> PhiFunction:
    """Non-decreasing step phi, >= 0 on (0, inf) and <= 0 on (-inf, 0)."""
    steps = []
    positive = sorted({Fraction(int(c), 4) for c in rng.integers(1, 60, size=rng.integers(0, 6))})
    level = Fraction(0)
    for index, lo in enumerate(positive):
        level += Fraction(int(rng.integers(0, 5)), 2)
        hi = positive[index + 1] if index + 1 < len(positive) else INF
        steps.append((lo, hi, level))
    negative = sorted({-Fraction(int(c), 4) for c in rng.integers(1, 60, size=rng.integers(0, 6))})
    drops = [Fraction(int(d), 3) for d in rng.integers(0, 4, size=len(negative))]
    for index in range(len(negative)):
        lo = -INF if index == 0 else negative[index]
        hi = negative[index + 1] if index + 1 < len(negative) else Fraction(0)
        steps.append((lo, hi, -sum(drops[index:], Fraction(0))))
    return PhiFunction.from_steps(steps)


def _random_phi_with_small_drops(rng: np.random.Generator) -> Tuple[PhiFunction, List[Fraction]]:
    """
    Step phi, odd in s, whose magnitude rises freely and drops by less than 1.

    Returns phi and its step values in increasing s, the zero gap around
    the origin included.
    """
    positions = sorted({Fraction(int(c), 4) for c in rng.integers(1, 80, size=rng.integers(1, 8))})
    magnitudes = []
    level = Fraction(0)
    for _ in positions:
        drop = Fraction(int(rng.integers(1, 8)), 8)
        if rng.random() < 0.35 and level - drop >= 0:
            level -= drop
        else:
            level += Fraction(int(rng.integers(1, 9)), 4)
        magnitudes.append(level)
    steps = []
    for index, (lo, level) in enumerate(zip(positions, magnitudes)):
        hi = positions[index + 1] if index + 1 < len(positions) else INF
        steps.append((lo, hi, level))
        steps.append((-hi, -lo, -level))
    values = [-m for m in reversed(magnitudes)] + [Fraction(0)] + magnitudes
    return PhiFunction.from_steps(steps), values


def _crosses_each_level_at_most_once(values: List[Fraction]) -> bool:
    k_max = math.ceil(max(abs(v) for v in values))
    return all(
        count_alternations((v > k) - (v < k) for v in values) <= 1
        for k in range(-k_max, k_max + 1)
    )


def _assert_decomposition_invariants(phi: PhiFunction):
    phi1, phi2 = decompose_phi(phi)
    assert phi1 + phi2 == phi
    for piece in phi2.steps:
        assert piece.value.denominator == 1
    for piece in phi1.steps:
        if piece.lo >= 0:
            assert 0 <= piece.value <= 1
        else:
            assert -1 <= piece.value <= 0
    values = [piece.value for piece in phi2.steps]
    assert values == sorted(values)


# ---------------------------------------------------------------------------
# Level crossing
# ---------------------------------------------------------------------------

def test_first_counterexample_violates_level_crossing_at_one_and_two():
    report = check_level_crossing(example_61_phi())
    assert report.counts[1] == 3 and report.counts[2] == 3
    assert report.violations == [1, 2]
    assert not report.passed and not report.approximate
    assert report.witness["k"] == 1


def test_half_integer_counterexample_violates_level_one():
    report = check_level_crossing(example_63_representation().phi)
    assert report.violations == [1]
    assert report.counts[1] == 2


def test_random_non_decreasing_steps_pass_and_decompose():
    rng = np.random.default_rng(20240611)
    for _ in range(500):
        phi = _random_monotone_phi(rng)
        report = check_level_crossing(phi)
        assert report.passed, phi
        _assert_decomposition_invariants(phi)


def test_random_steps_with_small_drops():
    rng = np.random.default_rng(20240612)
    outcomes = []
    for _ in range(400):
        phi, values = _random_phi_with_small_drops(rng)
        passed = check_level_crossing(phi).passed
        assert passed == _crosses_each_level_at_most_once(values), phi
        if passed:
            _assert_decomposition_invariants(phi)
        else:
            with pytest.raises(LevelCrossingViolated):
                decompose_phi(phi)
        outcomes.append(passed)
    assert any(outcomes) and not all(outcomes)


def test_decomposition_of_fractional_levels():
    phi = PhiFunction.from_steps([(1, 2, Fraction(1, 2)), (2, 5, Fraction(3, 2)), (5, INF, Fraction(5, 2))])
    phi1, phi2 = decompose_phi(phi)
    assert phi2 == PhiFunction.from_steps([(2, 5, 1), (5, INF, 2)])
    assert phi1 == PhiFunction.from_steps([(1, INF, Fraction(1, 2))])


def test_decomposition_rejects_violations():
    with pytest.raises(LevelCrossingViolated) as info:
        decompose_phi(example_61_phi())
    assert info.value.report.violations == [1, 2]


def test_sign_condition_is_part_of_the_check():
    report = check_level_crossing(PhiFunction.from_steps([(1, INF, -1)]))
    assert not report.sign_condition and not report.passed


def test_sampled_analytic_phi_is_flagged_approximate():
    report = check_level_crossing(two_pole_phi(1, 2), k_max=4)
    assert report.approximate
    assert report.passed


def test_zero_steps_are_dropped_and_neighbours_merged():
    phi = PhiFunction.from_steps([(1, 2, 1), (2, 3, 1), (3, 4, 0)])
    assert phi.steps == (StepPiece(1, 3, 1),)
    assert phi.value(Fraction(5, 2)) == 1 and phi.value(0) == 0


# ---------------------------------------------------------------------------
# Tails and transforms
# ---------------------------------------------------------------------------

def test_tail_integral_of_step_phi_is_exact():
    report = check_tail_integrability(example_61_phi())
    assert report.finite and report.exact
    assert report.value == Fraction(3, 2) * (Fraction(1, 4) - Fraction(1, 16)) + Fraction(2, 289)


def test_power_law_tails_with_large_exponent_diverge():
    phi = PhiFunction((), (PowerLaw(0, INF, 1, Fraction(5, 2)),))
    assert not check_tail_integrability(phi).finite


def test_interlacing_constants_of_first_counterexample():
    rep = example_61_representation()
    assert rep.b == Fraction(67, 68)
    assert rep.c.is_rational and rep.c.rational == 0
    assert rep.phi == example_61_phi()


def test_interlacing_with_negative_partial_sum_is_not_representable():
    with pytest.raises(NotExpRepresentable):
        phi_from_interlacing_rational(((3, 1),), ((2, 1),))


@pytest.mark.parametrize("rep, target", [
    (example_61_representation(), example_61_transform()),
    (example_63_representation(), example_63_transform()),
    (BellRepresentation(a=1), gaussian_transform(1)),
    (representation_from_interlacing_rational(((Fraction(1, 2), 1), (Fraction(-1, 4), 1)), ((-3, 1),)),
     rational_transform(((Fraction(1, 2), 1), (Fraction(-1, 4), 1)), ((-3, 1),))),
], ids=["ex61", "ex63", "gaussian", "two-sided"])
def test_transform_of_representation_matches_closed_form(rep, target):
    for xi in IDENTITY_POINTS:
        assert abs(transform_from_representation(rep, xi) - complex(target.mp(xi))) <= 1e-10


def test_transform_is_undefined_at_the_origin():
    with pytest.raises(ValueError):
        transform_from_representation(example_61_representation(), 0)


# ---------------------------------------------------------------------------
# Polya side and Stieltjes side
# ---------------------------------------------------------------------------

def test_split_of_a_pure_polya_representation():
    poles = ((Fraction(1, 2), 1), (5, 2))
    rep = representation_from_interlacing_rational(poles)
    stieltjes, polya = split_representation(rep)
    assert polya.b_tilde == Fraction(12, 5)
    assert LogCombination.coerce(stieltjes.c_tilde).is_rational
    assert stieltjes.c_tilde.rational == 0
    assert polya.params.zeros == (Fraction(1, 2), Fraction(5), Fraction(5))
    target = rational_transform(poles)
    for xi in (0.3, 2.0, 11.0):
        product = stieltjes_side_transform(stieltjes, xi) * polya_transform(polya.params, xi)
        assert abs(product - complex(target.mp(xi))) <= 1e-12


def test_polya_family_moments_and_levy_density():
    assert polya_phi_moment(PolyaParams.geometric(1)) == Fraction(1, 6)
    assert polya_phi_moment(PolyaParams.geometric(10)) == Fraction(1, 600)
    assert PolyaParams.geometric(4).b == Fraction(1, 4)
    phi = polya_phi(PolyaParams.geometric(1), n_terms=3)
    assert phi == PhiFunction.from_steps([(2, 4, 1), (4, 8, 2), (8, INF, 3)])
    assert check_level_crossing(phi).passed
    expected = ExpPolySum.on_half_line([(1, 0, -2), (1, 0, -4), (1, 0, -8)])
    assert levy_density_exp_form(phi) == expected


def test_geometric_product_matches_direct_product():
    from mpmath import mp

    params = PolyaParams.geometric(1)
    for xi in (1.0, 10.0, 100.0):
        direct = complex(mp.fprod(1 / (1 + mp.mpc(0, xi) / 2 ** n) for n in range(1, 80)))
        assert abs(polya_transform(params, xi) - direct) <= 1e-9


def test_stieltjes_partial_fractions_and_positivity():
    z = sympy.Symbol("z")
    data = stieltjes_from_partial_fractions(sympy.Rational(1, 2) + 1 / (z + 1) + 2 / (z + 3), z)
    assert data == StieltjesData(Fraction(1, 2), ((1, 1), (3, 2)))
    assert nevanlinna_pick_holds(data, [1j, 2 + 0.5j, -3 + 4j])
    assert stieltjes_eval(data, 1) == sympy.Rational(1, 2) + sympy.Rational(1, 2) + sympy.Rational(1, 2)
    with pytest.raises(PoleHit):
        stieltjes_eval(data, Fraction(-1))


def test_split_transforms_multiply_back_to_the_representation():
    rng = np.random.default_rng(20240613)
    checked = 0
    while checked < 40:
        if rng.random() < 0.5:
            phi = _random_monotone_phi(rng)
        else:
            phi, _ = _random_phi_with_small_drops(rng)
            if not check_level_crossing(phi).passed:
                continue
        rep = BellRepresentation(
            a=Fraction(int(rng.integers(0, 2)), 4),
            b=Fraction(int(rng.integers(-6, 7)), 3),
            c=Fraction(int(rng.integers(-4, 5)), 2),
            phi=phi,
        )
        stieltjes, polya = split_representation(rep)
        for xi in (-2.3, 0.7, 6.0):
            direct = transform_from_representation(rep, xi)
            product = stieltjes_side_transform(stieltjes, xi) * polya_transform(polya.params, xi)
            assert abs(product - direct) <= 1e-9 * max(1.0, abs(direct)), (phi, xi)
        checked += 1


def test_random_stieltjes_functions_map_upper_half_plane_to_itself():
    rng = np.random.default_rng(20240614)
    for _ in range(200):
        plus = {Fraction(int(s), 4): Fraction(int(w), 3)
                for s, w in zip(rng.integers(1, 40, size=4), rng.integers(1, 10, size=4))}
        minus = {Fraction(int(s), 4): Fraction(int(w), 3)
                 for s, w in zip(rng.integers(1, 40, size=rng.integers(0, 3)), rng.integers(1, 10, size=3))}
        data = StieltjesData(Fraction(int(rng.integers(0, 5)), 2), tuple(plus.items()), tuple(minus.items()))
        samples = [complex(x, y) for x, y in zip(rng.uniform(-20, 20, size=8), rng.uniform(0.1, 20, size=8))]
        assert nevanlinna_pick_holds(data, samples)


# ---------------------------------------------------------------------------
# Levy densities
# ---------------------------------------------------------------------------

def test_levy_density_of_first_counterexample():
    x_nu = levy_density_exp_form(example_61_phi())
    assert x_nu == ExpPolySum.on_half_line([(3, 0, -2), (-3, 0, -4), (4, 0, -17)])
    expected = 3 * math.exp(-2) - 3 * math.exp(-4) + 4 * math.exp(-17)
    assert abs(nu_from_phi(example_61_phi(), 1) - expected) <= 1e-14


def test_exp_over_x_round_trip_on_the_negative_side():
    form = ExpOverX(((Fraction(1), Fraction(2)), (Fraction(3), Fraction(5))), side=-1)
    phi = phi_from_nu(form)
    for x in (-0.5, -1.0, -3.0):
        assert abs(nu_from_phi(phi, x) - form.density(x)) <= 1e-13 * form.density(x)
    assert levy_density_exp_form(phi, side=1).is_zero


def test_power_law_levy_density():
    phi = PhiFunction((), (PowerLaw(0, INF, 1, Fraction(1, 2)),))
    assert abs(nu_from_phi(phi, 1) - 1) <= 1e-14
    assert abs(nu_from_phi(phi, 4) - 4 ** -1.5) <= 1e-14
    assert nu_from_phi(phi, -1) == 0


def test_truncated_laplace_converges_to_the_improper_integral():
    from mpmath import mp

    for upper in (5, 10, 20):
        value = truncated_laplace(lambda x: mp.exp(-x), 1.0, upper)
        assert abs(value - 1 / (1 + 1j)) <= 2 * math.exp(-upper)
