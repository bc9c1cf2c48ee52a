"""
Tests for Fourier inversion, heat-kernel convolution, grid sign counting
and the numeric bell test.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from scripts.errors import InvalidIndex, NonIntegrable, UnsupportedFractionalPower
from scripts.examples import example_61_density, example_61_transform, example_63_density, example_63_transform
from scripts.numeric import (
    PRECISION_ENV,
    GridSpec,
    QuadratureOptions,
    bell_test,
    convolve_gauss_exact_form,
    convolve_gauss_quadrature,
    count_sign_changes_grid,
    estimate_location_scale,
    heat_kernel,
    invert_transform,
    invert_transform_grid,
    stable_fourier,
    stable_representation,
    stable_transform,
)
from scripts.representation import check_boundary_conditions
from scripts.transforms import cauchy_transform, gaussian_transform, rational_transform, two_pole_transform


def _gauss(x: float, t: float) -> float:
    return math.exp(-x * x / (4 * t)) / math.sqrt(4 * math.pi * t)


# ---------------------------------------------------------------------------
# Options
# ---------------------------------------------------------------------------

def test_options_validation():
    with pytest.raises(ValueError):
        QuadratureOptions(working_dps=20)
    with pytest.raises(ValueError):
        QuadratureOptions(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureOptions(tail_strategy="simpson")


def test_precision_from_environment(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "50")
    assert QuadratureOptions.from_env().working_dps == 50
    assert QuadratureOptions.from_env(working_dps=40).working_dps == 40
    monkeypatch.setenv(PRECISION_ENV, "many")
    with pytest.raises(ValueError):
        QuadratureOptions.from_env()


# ---------------------------------------------------------------------------
# Convolution with the heat kernel
# ---------------------------------------------------------------------------

def test_heat_kernels_form_a_semigroup():
    for x in (0.0, 0.7, -2.0):
        value = convolve_gauss_quadrature(lambda y: heat_kernel(y, mp.mpf("0.5")), 0.25, x)
        assert abs(value - _gauss(x, 0.75)) <= 1e-12


def test_closed_form_convolution_matches_quadrature():
    f = example_61_density()
    for x in (0.05, 0.5, 2.0):
        exact_form = convolve_gauss_exact_form(f, 0.01, x)
        quadrature = convolve_gauss_quadrature(lambda y: f.to_mpf(y), 0.01, x, support=(Fraction(0), math.inf))
        assert abs(exact_form - quadrature) <= 1e-10 * max(1.0, abs(quadrature))


def test_closed_form_convolution_rejects_fractional_powers():
    with pytest.raises(UnsupportedFractionalPower):
        convolve_gauss_exact_form(example_63_density(), 0.1, 1.0)


def test_convolution_needs_positive_heat_parameter():
    with pytest.raises(ValueError):
        convolve_gauss_exact_form(example_61_density(), 0, 1.0)


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------

def test_pointwise_inversion_of_the_gaussian(opts):
    F = gaussian_transform(1)
    for x in (0.0, 0.7, 3.0):
        assert abs(invert_transform(F, x, 0, 0.0, opts) - _gauss(x, 1.0)) <= 1e-10
        assert abs(invert_transform(F, x, 0, 0.5, opts) - _gauss(x, 1.5)) <= 1e-10
        derivative = -x / 3.0 * _gauss(x, 1.5)
        assert abs(invert_transform(F, x, 1, 0.5, opts) - derivative) <= 1e-10


def test_inversion_of_the_first_counterexample_matches_exact_density(opts):
    F = rational_transform(((2, 3), (17, 4)), ((4, 3),))
    f = example_61_density()
    for x in (Fraction(1, 2), Fraction(2)):
        assert abs(invert_transform(F, x, 0, 0.0, opts) - float(f.to_mpf(x))) <= 1e-8


def test_slowly_decaying_transforms_need_damping(opts):
    with pytest.raises(NonIntegrable):
        invert_transform(rational_transform(((1, 1),)), 1.0, 0, 0.0, opts)
    with pytest.raises(ValueError):
        invert_transform(gaussian_transform(1), 1.0, 0, -1.0, opts)


def test_grid_inversion_of_the_gaussian(opts):
    x = np.linspace(-6.0, 6.0, 121)
    inversion = invert_transform_grid(gaussian_transform(1), x, 2, 0.2, opts)
    t = 1.2
    expected = (x * x / (4 * t * t) - 1 / (2 * t)) * np.exp(-x * x / (4 * t)) / math.sqrt(4 * math.pi * t)
    assert np.max(np.abs(inversion.values - expected)) <= 1e-10
    assert inversion.tolerance < 1e-10


def test_location_and_scale_of_the_gaussian():
    mean, sigma = estimate_location_scale(gaussian_transform(1), 0.0)
    assert abs(mean) <= 1e-12
    assert abs(sigma - math.sqrt(2)) <= 1e-3


def test_heat_semigroup_through_inversion(opts):
    rng = np.random.default_rng(41)
    for _ in range(50):
        s = Fraction(int(rng.integers(1, 41)), 20)
        t = float(rng.uniform(0.01, 1.0))
        x = float(rng.uniform(-6.0, 6.0))
        assert abs(invert_transform(gaussian_transform(s), x, 0, t, opts) - _gauss(x, float(s) + t)) <= 1e-8


def test_heat_semigroup_on_the_first_counterexample(opts):
    from scipy.integrate import trapezoid

    rng = np.random.default_rng(43)
    F = example_61_transform()
    for _ in range(6):
        s, t = (float(v) for v in rng.uniform(0.05, 0.2, size=2))
        x = float(rng.uniform(-1.0, 5.0))
        y = np.linspace(x - 10.0, x + 10.0, 8001)
        inner = invert_transform_grid(F, y, 0, t, opts)
        assert inner.tolerance <= 1e-10
        kernel = np.exp(-(x - y) ** 2 / (4 * s)) / math.sqrt(4 * math.pi * s)
        convolved = trapezoid(inner.values * kernel, y)
        assert abs(convolved - invert_transform(F, x, 0, s + t, opts)) <= 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_derivatives_agree_with_central_differences(opts, n):
    F = example_61_transform()
    t = 0.1
    steps = (0.1, 0.05, 0.025)
    for x in (0.3, 1.5):
        exact = invert_transform(F, x, n, t, opts)
        errors = []
        for h in steps:
            left, centre, right = (invert_transform(F, x + d, 0, t, opts) for d in (-h, 0.0, h))
            estimate = (right - left) / (2 * h) if n == 1 else (right - 2 * centre + left) / (h * h)
            errors.append(abs(estimate - exact))
        slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
        assert slope >= 1.8, (x, errors)
        assert errors[-1] <= 1e-2 * max(1.0, abs(exact))


@pytest.mark.parametrize("F", [gaussian_transform(1), cauchy_transform(1), two_pole_transform(1, 2)],
                         ids=["gaussian", "cauchy", "two-pole"])
def test_even_transforms_invert_to_functions_of_matching_parity(opts, F):
    rng = np.random.default_rng(47)
    for x in rng.uniform(0.1, 5.0, size=3):
        for n in range(4):
            right = invert_transform(F, float(x), n, 0.05, opts)
            left = invert_transform(F, -float(x), n, 0.05, opts)
            assert abs(right - (-1) ** n * left) <= 1e-10


# ---------------------------------------------------------------------------
# Sign changes and the bell test
# ---------------------------------------------------------------------------

def test_grid_sign_changes_ignore_values_below_tolerance():
    values = [(0.0, 1.0), (1.0, -1.0), (2.0, 1e-12), (3.0, -1e-12), (4.0, 2.0)]
    assert count_sign_changes_grid(values, 1e-6) == 2
    assert count_sign_changes_grid(values, 0.0) == 4
    assert count_sign_changes_grid(values, [0.0, 0.0, 1.0, 1.0, 0.0]) == 2


def test_grid_must_be_increasing():
    with pytest.raises(ValueError):
        count_sign_changes_grid([(1.0, 1.0), (0.0, -1.0)], 0.0)


def test_gaussian_bell_test_low_orders(opts):
    report = bell_test(gaussian_transform(1), 3, 0.1, opts=opts, check_boundary=False)
    assert [o.count for o in report.orders] == [0, 1, 2, 3]
    assert report.passed and report.verdict == "pass"
    assert report.order(3).crossings and report.to_dict()["label"] == "numeric evidence"


def test_explicit_grid_with_forced_points(opts):
    layout = GridSpec(explicit=tuple(np.linspace(-8.0, 8.0, 801)), precise=(0.0,))
    report = bell_test(gaussian_transform(1), 1, 0.1, grid=layout, opts=opts, orders=[1], check_boundary=False)
    assert report.order(1).count == 1


def test_bell_test_needs_positive_heat_parameter(opts):
    with pytest.raises(ValueError):
        bell_test(gaussian_transform(1), 2, 0.0, opts=opts)


def test_boundary_conditions_of_the_gaussian():
    report = check_boundary_conditions(gaussian_transform(1))
    assert report.satisfied
    assert report.to_dict()["label"] == "numeric evidence"


@pytest.mark.slow
def test_gaussian_bell_test_to_order_ten(opts):
    report = bell_test(gaussian_transform(1), 10, 0.1, opts=opts)
    assert [o.count for o in report.orders] == list(range(11))
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("F, n_max, t", [
    (cauchy_transform(1), 8, 0.1),
    (two_pole_transform(1, 2), 6, 0.05),
    (stable_fourier(Fraction(1, 2), 1, 1), 6, 0.1),
    (stable_fourier(Fraction(3, 2), 1, 1), 6, 0.1),
], ids=["cauchy", "two-pole", "stable-1/2", "stable-3/2"])
def test_bell_shaped_controls(opts, F, n_max, t):
    report = bell_test(F, n_max, t, opts=opts)
    assert [o.count for o in report.orders] == list(range(n_max + 1))
    assert report.passed


@pytest.mark.slow
def test_first_counterexample_has_four_sign_changes_at_small_t(opts):
    report = bell_test(example_61_transform(), 2, 1e-3, opts=opts, orders=[2], check_boundary=False)
    assert report.order(2).count >= 4


@pytest.mark.slow
@pytest.mark.parametrize("F, n", [(example_61_transform(), 1), (example_61_transform(), 2),
                                  (example_63_transform(), 2)], ids=["ex61-n1", "ex61-n2", "ex63-n2"])
def test_sign_changes_do_not_increase_with_t(opts, F, n):
    counts = [
        bell_test(F, n, t, opts=opts, orders=[n], check_boundary=False).order(n).count
        for t in (1e-3, 1e-2, 1e-1)
    ]
    assert counts == sorted(counts, reverse=True)


# ---------------------------------------------------------------------------
# Stable laws
# ---------------------------------------------------------------------------

def test_stable_index_must_lie_in_open_interval():
    with pytest.raises(InvalidIndex):
        stable_representation(2, 1, 1)
    with pytest.raises(InvalidIndex):
        stable_transform(0, 1, 1, 1.0)


def test_symmetric_stable_transform_is_real():
    for alpha in (Fraction(1, 2), Fraction(3, 2)):
        for xi in (0.5, 2.0):
            assert abs(stable_transform(alpha, 1, 1, xi).imag) <= 1e-12


def test_normalised_symmetric_half_stable_transform():
    for xi in (0.5, 2.0, -3.0):
        value = stable_transform(Fraction(1, 2), 1, 1, xi, normalise=True)
        assert abs(value - math.exp(-2 * math.sqrt(2 * math.pi * abs(xi)))) <= 1e-12


def test_smoothed_counterexample_keeps_unit_mass(opts):
    from scipy.integrate import trapezoid

    x = np.linspace(-5.0, 40.0, 4501)
    inversion = invert_transform_grid(rational_transform(((2, 3), (17, 4)), ((4, 3),)), x, 0, 0.01, opts)
    assert abs(trapezoid(inversion.values, x) - 1.0) <= 1e-6
