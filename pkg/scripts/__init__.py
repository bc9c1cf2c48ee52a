"""
Bell-Shape Analysis - Scripts Package

This package contains the exact and numeric tools for deciding whether a
function given by its exponential representation is (weakly) bell-shaped,
together with the worked examples and counterexamples that exercise them.
"""

__version__ = "1.0.0"
__author__ = "Bell-Shape Analysis Contributors"

from .errors import (
    BellShapeError,
    InputFormatError,
    PrecisionExhausted,
    Unstable,
    UnknownCase
)

from .exact_core import (
    SymbolicValue,
    ExpPolySum,
    PolynomialExact,
    RationalFunctionExact,
    diff_exppoly,
    eval_exact,
    sign_certified,
    sign_changes_lower_bound,
    diff_rational,
    isolate_real_roots,
    count_sign_changes_exact
)

from .representation import (
    PhiFunction,
    BellRepresentation,
    PolyaParams,
    check_level_crossing,
    check_tail_integrability,
    decompose_phi,
    transform_from_representation,
    split_representation,
    representation_from_interlacing_rational,
    levy_density_exp_form
)

from .numeric import (
    QuadratureOptions,
    invert_transform,
    convolve_gauss_exact_form,
    count_sign_changes_grid,
    bell_test,
    find_failure_witness,
    stable_transform
)

from .examples import (
    run_case,
    run_all
)

__all__ = [
    # Errors
    'BellShapeError',
    'InputFormatError',
    'PrecisionExhausted',
    'Unstable',
    'UnknownCase',

    # Exact calculus
    'SymbolicValue',
    'ExpPolySum',
    'PolynomialExact',
    'RationalFunctionExact',
    'diff_exppoly',
    'eval_exact',
    'sign_certified',
    'sign_changes_lower_bound',
    'diff_rational',
    'isolate_real_roots',
    'count_sign_changes_exact',

    # Representation
    'PhiFunction',
    'BellRepresentation',
    'PolyaParams',
    'check_level_crossing',
    'check_tail_integrability',
    'decompose_phi',
    'transform_from_representation',
    'split_representation',
    'representation_from_interlacing_rational',
    'levy_density_exp_form',

    # Numerics
    'QuadratureOptions',
    'invert_transform',
    'convolve_gauss_exact_form',
    'count_sign_changes_grid',
    'bell_test',
    'find_failure_witness',
    'stable_transform',

    # Example catalog
    'run_case',
    'run_all'
]
