"""
Example Catalog

Table-driven reproduction suite. Every worked example and counterexample
is an ExampleCase holding the object under study and a list of claims;
each claim names the library operation that checks it, its expected
result and where the expectation comes from ("published", "derived" or
"trivial"). Exact claims are certificates; numeric claims are evidence.
"""

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from mpmath import mp
from tqdm import tqdm

from .errors import InvalidIndex, PrecisionExhausted, UnknownCase, Unstable
from .exact_core import (
    ExpPolySum,
    PolynomialExact,
    RationalFunctionExact,
    SymbolicValue,
    count_sign_changes_exact,
    diff_exppoly,
    diff_rational,
    eval_exact,
    inverse_laplace_rational,
    isolate_real_roots,
    real_root_count,
    sign_certified,
    sign_changes_lower_bound,
)
from .intervals import CertifiedInterval, exp_interval, log_enclosure
from .numeric import (
    GridSpec,
    QuadratureOptions,
    bell_test,
    count_sign_changes_grid,
    find_failure_witness,
    invert_transform,
    invert_transform_grid,
    stable_fourier,
    stable_transform,
)
from .representation import (
    INF,
    BesselArg,
    BellRepresentation,
    PhiFunction,
    PolyaParams,
    TwoPoleArg,
    calibrate_constants,
    check_level_crossing,
    levy_density_exp_form,
    nu_from_phi,
    polya_fourier,
    polya_phi,
    polya_phi_moment,
    polya_transform,
    representation_from_interlacing_rational,
    transform_from_representation,
)
from .transforms import (
    FourierTransform,
    bessel_transform,
    cauchy_transform,
    gaussian_transform,
    inverse_sqrt_transform,
    rational_transform,
    two_pole_transform,
)

logger = logging.getLogger(__name__)

CLAIM_KINDS = ("exact-sign", "exact-value", "exact-count", "numeric-count", "identity")
VERDICTS = ("pass", "fail", "error", "inconclusive", "skipped")

# Transform identities are compared at 20 non-zero points of [-10, 10]
IDENTITY_POINTS = tuple(x for x in np.linspace(-10.0, 10.0, 21) if x != 0)


# ---------------------------------------------------------------------------
# Objects of the worked examples
# ---------------------------------------------------------------------------

EX61_POLES = ((Fraction(2), Fraction(3)), (Fraction(17), Fraction(4)))
EX61_ZEROS = ((Fraction(4), Fraction(3)),)
EX61_SCALE = Fraction(83521, 36450000)

EX63_POLES = ((Fraction(1), Fraction(3, 2)),)
EX63_ZEROS = ((Fraction(2), Fraction(1)),)

EX65_DENOMINATOR = "(1 + x**2)*(9 + x**2)*(16 + x**2)"


def example_61_transform() -> FourierTransform:
    """(1 + z/4)^3 / ((1 + z/2)^3 (1 + z/17)^4)."""
    return rational_transform(EX61_POLES, EX61_ZEROS)


def example_61_representation() -> BellRepresentation:
    return representation_from_interlacing_rational(EX61_POLES, EX61_ZEROS)


def example_61_phi() -> PhiFunction:
    return PhiFunction.from_steps([(2, 4, 3), (17, INF, 4)])


def example_61_density() -> ExpPolySum:
    """The closed form of the density, as displayed for the first counterexample."""
    s = EX61_SCALE
    return ExpPolySum.on_half_line([
        (284 * s, 0, -2), (888 * s, 1, -2), (360 * s, 2, -2),
        (-284 * s, 0, -17), (-5148 * s, 1, -17), (-45630 * s, 2, -17), (494325 * s, 3, -17),
    ])


def example_61_sympy_transform(z: sympy.Symbol):
    return (1 + z / 4) ** 3 / ((1 + z / 2) ** 3 * (1 + z / 17) ** 4)


def example_63_transform() -> FourierTransform:
    """(1 + z/2) / (1 + z)^(3/2)."""
    return rational_transform(EX63_POLES, EX63_ZEROS)


def example_63_representation() -> BellRepresentation:
    return representation_from_interlacing_rational(EX63_POLES, EX63_ZEROS)


def example_63_density() -> ExpPolySum:
    """(2 sqrt(pi))^-1 (1 + 2x) x^(-1/2) e^(-x) on (0, inf)."""
    return ExpPolySum.on_half_line([
        (Fraction(1, 2), Fraction(-1, 2), -1, -1),
        (1, Fraction(1, 2), -1, -1),
    ])


def example_65_function() -> RationalFunctionExact:
    """(1 + x^2)^-1 (9 + x^2)^-1 (16 + x^2)^-1 without the positive factor 210/pi."""
    return RationalFunctionExact.from_exprs(1, sympy.sympify(EX65_DENOMINATOR, locals={"x": sympy.Symbol("x")}))


def two_pole_phi(p=Fraction(1), q=Fraction(2)) -> PhiFunction:
    return PhiFunction((), (TwoPoleArg(-INF, 0, p, q), TwoPoleArg(0, INF, p, q)))


def bessel_phi(p) -> PhiFunction:
    return PhiFunction((), (BesselArg(-INF, 0, p), BesselArg(0, INF, p)))


# ---------------------------------------------------------------------------
# Exact polynomial recurrences of the classical bell-shaped families
# ---------------------------------------------------------------------------

_LINEAR = PolynomialExact((0, 1))
_ONE_PLUS_SQUARE = PolynomialExact((1, 0, 1))
_SQUARE = PolynomialExact((0, 0, 1))


def hermite_numerators(n_max: int) -> List[PolynomialExact]:
    """P_n with (G_1)^(n) = P_n G_1: P_(n+1) = P_n' - (x/2) P_n."""
    out = [PolynomialExact((1,))]
    for _ in range(n_max):
        p = out[-1]
        out.append(p.derivative() - _LINEAR * p * Fraction(1, 2))
    return out


def inverse_power_numerators(p, n_max: int) -> List[PolynomialExact]:
    """P_n with ((1 + x^2)^-p)^(n) = P_n (1 + x^2)^-(p+n)."""
    p = Fraction(p)
    out = [PolynomialExact((1,))]
    for n in range(n_max):
        q = out[-1]
        out.append(_ONE_PLUS_SQUARE * q.derivative() - _LINEAR * q * (2 * (p + n)))
    return out


def hitting_time_numerators(p, n_max: int) -> List[PolynomialExact]:
    """Q_n with (x^-p e^(-1/x))^(n) = Q_n x^(-p-2n) e^(-1/x) on (0, inf)."""
    p = Fraction(p)
    out = [PolynomialExact((1,))]
    for n in range(n_max):
        q = out[-1]
        out.append(_SQUARE * q.derivative() - _LINEAR * q * (p + 2 * n) + q)
    return out


# ---------------------------------------------------------------------------
# Claims and reports
# ---------------------------------------------------------------------------

@dataclass
class Outcome:
    """What a claim check observed."""

    observed: Any
    passed: bool
    witness: Any = None
    inconclusive: bool = False


@dataclass
class Claim:
    """
    One verifiable statement about a case.

    Attributes:
    -----------
    kind : str
        One of CLAIM_KINDS
    description : str
        Subject of the claim, e.g. "sign changes of f^(57)"
    expected : Any
        Expected result as printed in reports
    method : str
        Library operation that performs the check
    check : Callable[[QuadratureOptions], Outcome]
        The check itself
    provenance : str
        "published", "derived" or "trivial"
    slow : bool
        Numeric searches and the high-order exact benchmark
    """

    kind: str
    description: str
    expected: Any
    method: str
    check: Callable[[QuadratureOptions], Outcome]
    provenance: str = "published"
    slow: bool = False

    def __post_init__(self):
        if self.kind not in CLAIM_KINDS:
            raise ValueError(f"Unknown claim kind {self.kind!r}")


@dataclass
class ClaimResult:
    kind: str
    description: str
    method: str
    provenance: str
    expected: Any
    observed: Any
    verdict: str
    witness: Any = None
    message: Optional[str] = None
    error_type: Optional[str] = None
    seconds: float = 0.0

    def line(self) -> str:
        return f"{self.description}: {self.observed} (expected {self.expected}) {self.verdict.upper()}"

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "description": self.description,
            "method": self.method,
            "provenance": self.provenance,
            "expected": _jsonable(self.expected),
            "observed": _jsonable(self.observed),
            "verdict": self.verdict,
            "witness": _jsonable(self.witness),
            "message": self.message,
            "error_type": self.error_type,
        }


@dataclass
class ExampleCase:
    id: str
    title: str
    subject: Any
    claims: List[Claim] = field(default_factory=list)


@dataclass
class CaseReport:
    id: str
    title: str
    results: List[ClaimResult] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {r.verdict for r in self.results}
        if "error" in verdicts:
            return "error"
        if "fail" in verdicts:
            return "fail"
        if "inconclusive" in verdicts:
            return "inconclusive"
        return "pass"

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "title": self.title,
            "verdict": self.verdict,
            "claims": [r.to_dict() for r in self.results],
        }


@dataclass
class SuiteReport:
    cases: List[CaseReport] = field(default_factory=list)

    @property
    def results(self) -> List[ClaimResult]:
        return [r for case in self.cases for r in case.results]

    @property
    def passed(self) -> bool:
        return all(r.verdict in ("pass", "inconclusive", "skipped") for r in self.results)

    def counts(self) -> Dict[str, int]:
        return {v: sum(r.verdict == v for r in self.results) for v in VERDICTS}

    def to_dict(self) -> Dict:
        return {
            "label": "exact certificates and numeric evidence",
            "passed": self.passed,
            "counts": self.counts(),
            "cases": [case.to_dict() for case in self.cases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (Fraction, SymbolicValue, CertifiedInterval)):
        return str(value)
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return str(value)


# ---------------------------------------------------------------------------
# Reusable checks
# ---------------------------------------------------------------------------

def _transform_agreement(rep: BellRepresentation, target: FourierTransform, points: Sequence[float],
                         tolerance: float) -> Outcome:
    errors = {float(x): abs(transform_from_representation(rep, float(x)) - complex(target.mp(x))) for x in points}
    worst = max(errors.values())
    return Outcome(f"max error {worst:.2e}", worst <= tolerance, {"errors": errors, "tolerance": tolerance})


def _bell_pass(F: FourierTransform, n_max: int, t: float, opts: QuadratureOptions) -> Outcome:
    report = bell_test(F, n_max, t, opts=opts)
    counts = [o.count for o in report.orders]
    return Outcome(counts, report.passed, report)


def _order_count(F: FourierTransform, n: int, t: float, minimum: int, opts: QuadratureOptions) -> Outcome:
    report = bell_test(F, n, t, opts=opts, orders=[n])
    count = report.order(n).count
    return Outcome(count, count >= minimum, report)


def _all_roots_real_and_simple(polynomials: Sequence[PolynomialExact], positive_only: bool = False) -> Outcome:
    observed = []
    for n, p in enumerate(polynomials):
        roots = isolate_real_roots(p) if p.degree > 0 else []
        simple = all(r.multiplicity == 1 for r in roots)
        count = real_root_count(p.poly, positive_only=True) if positive_only and p.degree > 0 else len(roots)
        observed.append((p.degree, count if simple else -1))
    passed = all(degree == n and count == n for n, (degree, count) in enumerate(observed))
    return Outcome([count for _, count in observed], passed, {"degrees": [d for d, _ in observed]})


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

_BUILDERS: Dict[str, Tuple[str, Callable[[], ExampleCase]]] = {}


def register(case_id: str, title: str):
    def decorator(builder: Callable[..., ExampleCase]):
        if case_id in _BUILDERS:
            raise ValueError(f"Duplicate case id {case_id}")
        _BUILDERS[case_id] = (title, builder)
        return builder
    return decorator


@register("6.1", "Infinitely divisible law with completely monotone Levy density that is not bell-shaped")
def _case_61() -> ExampleCase:
    rep = example_61_representation()
    f = example_61_density()
    f2 = diff_exppoly(f, 2)
    s = Fraction(83521, 2332800000)
    expected_values = {
        Fraction(1, 4): SymbolicValue(((-38168123 * s, Fraction(-17, 4), 0), (-92032 * s, Fraction(-1, 2), 0))),
        Fraction(1, 2): SymbolicValue(((271849 * 1000 * s, Fraction(-17, 2), 0), (-64 * 1000 * s, -1, 0))),
        Fraction(3, 4): SymbolicValue(((1787319463 * s, Fraction(-51, 4), 0), (-24448 * s, Fraction(-3, 2), 0))),
    }

    def values(_):
        observed = {str(x): eval_exact(f2, x) for x in expected_values}
        passed = all(observed[str(x)] == v for x, v in expected_values.items())
        return Outcome({k: str(v) for k, v in observed.items()}, passed)

    def signs(_):
        observed = [sign_certified(eval_exact(f2, x)) for x in expected_values]
        return Outcome(observed, observed == [-1, 1, -1])

    def lower_bound(_):
        samples = [Fraction(1, 100), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(100)]
        count = sign_changes_lower_bound(f2, samples)
        return Outcome(count, count >= 4, {"samples": [str(x) for x in samples]})

    def level_crossing(_):
        report = check_level_crossing(rep.phi)
        observed = {k: report.counts.get(k) for k in (1, 2)}
        return Outcome(observed, not report.passed and observed == {1: 3, 2: 3}, report)

    def constants(_):
        observed = (str(rep.b), str(rep.c), rep.phi == example_61_phi())
        return Outcome(observed, rep.b == Fraction(67, 68) and rep.c.is_rational and rep.c.rational == 0
                       and observed[2])

    def exact_inverse(_):
        z = sympy.Symbol("z")
        inverse = inverse_laplace_rational(example_61_sympy_transform(z), z)
        return Outcome(str(inverse), inverse == f)

    def levy_density(_):
        x = 1
        expected = 3 * math.exp(-2) - 3 * math.exp(-4) + 4 * math.exp(-17)
        observed = nu_from_phi(rep.phi, x)
        return Outcome(observed, abs(observed - expected) <= 1e-14, {"x": x, "reference": expected})

    def inversion(opts):
        F = example_61_transform()
        errors = {}
        for x in (Fraction(1, 2), Fraction(1), Fraction(2)):
            exact = float(eval_exact(f, x))
            errors[str(x)] = abs(invert_transform(F, x, 0, 0.0, opts) - exact)
        worst = max(errors.values())
        return Outcome(f"max error {worst:.2e}", worst <= 1e-8, errors)

    claims = [
        Claim("exact-value", "f'' at 1/4, 1/2, 3/4", "displayed closed forms", "eval_exact", values),
        Claim("exact-sign", "signs of f'' at 1/4, 1/2, 3/4", [-1, 1, -1], "sign_certified", signs),
        Claim("exact-count", "sign changes of f''", ">= 4", "sign_changes_lower_bound", lower_bound),
        Claim("exact-count", "sign changes of phi - k for k = 1, 2", {1: 3, 2: 3}, "check_level_crossing",
              level_crossing),
        Claim("identity", "constants (b, c) and phi from the pole/zero structure", ("67/68", "0", True),
              "representation_from_interlacing_rational", constants),
        Claim("identity", "partial-fraction inverse equals the displayed f", "equal", "inverse_laplace_rational",
              exact_inverse, provenance="derived"),
        Claim("identity", "x nu(x) at x = 1", "3e^-2 - 3e^-4 + 4e^-17", "nu_from_phi", levy_density,
              provenance="derived"),
        Claim("identity", "transform of (a, b, c, phi) vs closed form", "<= 1e-10", "transform_from_representation",
              lambda _: _transform_agreement(rep, example_61_transform(), IDENTITY_POINTS, 1e-10)),
        Claim("numeric-count", "inversion vs exact f at 1/2, 1, 2", "<= 1e-8", "invert_transform", inversion,
              provenance="derived", slow=True),
        Claim("numeric-count", "sign changes of (f*G_t)'' at t = 1e-3", ">= 4", "bell_test",
              lambda opts: _order_count(example_61_transform(), 2, 1e-3, 4, opts), slow=True),
    ]
    return ExampleCase("6.1", _BUILDERS["6.1"][0], rep, claims)


@register("6.1m", "Smooth variant f*g_m of the first counterexample")
def _case_61m() -> ExampleCase:
    scales = (10, 100, 1000, 10_000)

    def drift(_):
        observed = {m: str(PolyaParams.geometric(m).b) for m in scales}
        return Outcome(observed, all(PolyaParams.geometric(m).b == Fraction(1, m) for m in scales))

    def search(opts):
        tried = {}
        for m in scales:
            F = example_61_transform().times(polya_fourier(PolyaParams.geometric(m)), name=f"f*g_{m}")
            try:
                report = bell_test(F, 2, 1e-4, opts=opts, orders=[2], check_boundary=False)
            except Unstable as exc:
                logger.info("m=%d: %s", m, exc)
                tried[m] = None
                continue
            tried[m] = report.order(2).count
            if tried[m] >= 4:
                return Outcome(f"m = {m}: {tried[m]}", True, {"tried": tried, "report": report})
        return Outcome("no witness", False, {"tried": tried}, inconclusive=True)

    claims = [
        Claim("identity", "drift b of g_m", "1/m", "PolyaParams.geometric", drift),
        Claim("numeric-count", "sign changes of (f*g_m*G_t)'' at t = 1e-4", ">= 4 for some m", "bell_test",
              search, slow=True),
    ]
    return ExampleCase("6.1m", _BUILDERS["6.1m"][0], PolyaParams.geometric(scales[0]), claims)


@register("6.2", "Self-decomposable law that is not bell-shaped")
def _case_62() -> ExampleCase:
    phi = example_61_phi()
    x_nu = levy_density_exp_form(phi)
    h = scaled_levy_derivative(phi, 2)

    def density(_):
        expected = ExpPolySum.on_half_line([(3, 0, -2), (-3, 0, -4), (4, 0, -17)])
        return Outcome(str(x_nu), x_nu == expected)

    def limit_at_zero(_):
        (piece,) = x_nu.pieces
        value = sum((t.coefficient for t in piece.terms), Fraction(0))
        return Outcome(str(value), value == 4)

    def derivative(_):
        expected = ExpPolySum.on_half_line([(-3, 0, 0), (6, 0, -2), (-34, 0, -15)])
        return Outcome(str(h), h == expected)

    def maximum(_):
        certificate = certify_three_term_maximum(h)
        return Outcome(certificate["sign"], certificate["sign"] == -1, certificate)

    def samples(_):
        points = [Fraction(1, 10), Fraction(1, 5), Fraction(1)]
        signs = [sign_certified(eval_exact(h, x)) for x in points]
        count = sign_changes_lower_bound(h, points)
        return Outcome(count, count == 0 and signs == [-1, -1, -1], {"signs": signs})

    claims = [
        Claim("identity", "x nu(x)", "3e^(-2x) - 3e^(-4x) + 4e^(-17x)", "levy_density_exp_form", density),
        Claim("exact-value", "limit of x nu(x) at 0+", "4", "levy_density_exp_form", limit_at_zero),
        Claim("identity", "e^(2x) (x nu(x))' / 2", "-3 + 6e^(-2x) - 34e^(-15x)", "diff_exppoly", derivative),
        Claim("exact-sign", "global maximum -3 + (26/5)(2/85)^(2/13)", -1, "log_enclosure", maximum),
        Claim("exact-count", "sign changes of -3 + 6e^(-2x) - 34e^(-15x) at 1/10, 1/5, 1", 0,
              "sign_changes_lower_bound", samples, provenance="derived"),
    ]
    return ExampleCase("6.2", _BUILDERS["6.2"][0], x_nu, claims)


def scaled_levy_derivative(phi: PhiFunction, rate=Fraction(2)) -> ExpPolySum:
    """e^(rate x) (x nu(x))' / rate on (0, inf) for a step phi."""
    rate = Fraction(rate)
    return diff_exppoly(levy_density_exp_form(phi), 1).shift_rates(rate).scale(1 / rate)


def certify_three_term_maximum(h: ExpPolySum, width=Fraction(1, 10 ** 30)) -> Dict:
    """
    Certified sign of sup h for h = c0 + c1 e^(l1 x) + c2 e^(l2 x) on (0, inf), l1 > l2.

    h' = e^(l2 x) (c2 l2 + c1 l1 e^((l1 - l2) x)) changes sign once, from +
    to -, when c1 l1 < 0 < c2 l2; the maximum sits at e^((l1 - l2) x) = rho
    with rho = -c2 l2 / (c1 l1), and equals c0 + (c1 + c2/rho) rho^(l1/(l1 - l2)).
    """
    (piece,) = h.pieces
    if piece.lo != 0 or not math.isinf(piece.hi):
        raise ValueError("Expected a function on (0, inf)")
    by_rate = {t.rate: t.coefficient for t in piece.terms if t.power == 0 and t.pi_power == 0}
    if len(by_rate) != len(piece.terms) or len(by_rate) != 3 or 0 not in by_rate:
        raise ValueError("Expected c0 + c1 e^(l1 x) + c2 e^(l2 x)")
    c0 = by_rate.pop(Fraction(0))
    (l2, c2), (l1, c1) = sorted(by_rate.items())
    if not (c1 * l1 < 0 < c2 * l2):
        raise ValueError("Derivative does not change sign from + to -")
    rho = -c2 * l2 / (c1 * l1)
    if rho <= 1:
        raise ValueError(f"Critical point e^((l1 - l2) x) = {rho} is not in (0, inf)")
    exponent = l1 / (l1 - l2)
    amplitude = c1 + c2 / rho
    power = exp_interval(log_enclosure(rho, width) * exponent, width)
    enclosure = power * amplitude + c0
    logger.info("maximum of h enclosed in %s", enclosure)
    return {
        "critical_point": f"x = log({rho}) / {l1 - l2}",
        "maximum": f"{c0} + {amplitude} * ({rho})^({exponent})",
        "enclosure": enclosure,
        "sign": enclosure.sign() if enclosure.excludes_zero() else 0,
    }


@register("6.3", "phi uniformly close to a non-decreasing function")
def _case_63() -> ExampleCase:
    rep = example_63_representation()
    f8 = diff_exppoly(example_63_density(), 8)
    expected = Fraction(-11598375, 67108864)

    def value(_):
        v = eval_exact(f8, 4)
        coefficient = v.coefficient(-4, -1)
        return Outcome(str(coefficient), coefficient == expected and v == SymbolicValue(((expected, -4, -1),)))

    def sign(_):
        observed = sign_certified(eval_exact(f8, 4))
        return Outcome(observed, observed == -1)

    def level_crossing(_):
        report = check_level_crossing(rep.phi)
        return Outcome(report.counts.get(1), not report.passed and report.violations == [1], report)

    def constants(_):
        return Outcome(str(rep.b), rep.b == 1 and rep.c.is_rational and rep.c.rational == 0)

    def auxiliary(opts):
        report = bell_test(inverse_sqrt_transform(), 8, 1.0, opts=opts, orders=[8], check_boundary=False)
        count = report.order(8).count
        return Outcome(count, count == 8, report)

    def witness(opts):
        deep = replace(opts, working_dps=max(opts.working_dps, 60), max_precise_points=min(opts.max_precise_points, 40))
        found = find_failure_witness(example_63_transform(), 8, 9, grid=GridSpec(precise=(4.0,)), opts=deep)
        if found is None:
            return Outcome("no witness", False)
        return Outcome(f"t = {found.t:g}: {found.result.count}", True, {"t": found.t, "tried": found.tried,
                                                                        "order": found.result})

    claims = [
        Claim("exact-value", "coefficient of e^-4 pi^-1/2 in f^(8)(4)", str(expected), "eval_exact", value),
        Claim("exact-sign", "sign of f^(8)(4)", -1, "sign_certified", sign),
        Claim("exact-count", "sign changes of phi - 1", 2, "check_level_crossing", level_crossing),
        Claim("identity", "drift b from the pole/zero structure", "1", "representation_from_interlacing_rational",
              constants),
        Claim("identity", "transform of (a, b, c, phi) vs closed form", "<= 1e-10", "transform_from_representation",
              lambda _: _transform_agreement(rep, example_63_transform(), IDENTITY_POINTS, 1e-10)),
        Claim("numeric-count", "sign changes of (g*G_1)^(8)", 8, "bell_test", auxiliary, slow=True),
        Claim("numeric-count", "sign changes of (f*G_t)^(8) for small t", ">= 9", "find_failure_witness", witness,
              slow=True),
    ]
    return ExampleCase("6.3", _BUILDERS["6.3"][0], rep, claims)


@register("6.4a", "Gauss-Weierstrass kernel")
def _case_64a() -> ExampleCase:
    rep = BellRepresentation(a=1)

    def hermite(_):
        return _all_roots_real_and_simple(hermite_numerators(10))

    def grid(opts):
        xs = np.linspace(-10.0, 10.0, 2001)
        inversion = invert_transform_grid(gaussian_transform(1), xs, 5, 0.0, opts)
        kernel = np.exp(-xs ** 2 / 4) / (2 * math.sqrt(math.pi))
        tolerance = opts.sign_tolerance_factor * inversion.tolerance / kernel
        count = count_sign_changes_grid(list(zip(xs, inversion.values / kernel)), tolerance)
        return Outcome(count, count == 5)

    claims = [
        Claim("exact-count", "real roots of (G_1)^(n) / G_1 for n <= 10", list(range(11)), "isolate_real_roots",
              hermite),
        Claim("numeric-count", "sign changes of (G_1)^(5) / G_1 on [-10, 10]", 5, "count_sign_changes_grid", grid),
        Claim("identity", "transform of a = 1, phi = 0 vs e^(-xi^2)", "<= 1e-12", "transform_from_representation",
              lambda _: _transform_agreement(rep, gaussian_transform(1), IDENTITY_POINTS, 1e-12),
              provenance="trivial"),
        Claim("numeric-count", "bell test of e^(-xi^2), t = 0.1, n <= 10", list(range(11)), "bell_test",
              lambda opts: _bell_pass(gaussian_transform(1), 10, 0.1, opts), provenance="trivial", slow=True),
    ]
    return ExampleCase("6.4a", _BUILDERS["6.4a"][0], rep, claims)


@register("6.4b", "Functions (1 + x^2)^-p")
def _case_64b() -> ExampleCase:
    powers = (Fraction(1), Fraction(2), Fraction(3))

    def polynomial_identity(p):
        def check(_):
            counts = []
            for n, numerator in enumerate(inverse_power_numerators(p, 8)):
                if numerator.degree != n:
                    return Outcome(counts, False, {"degree": numerator.degree, "n": n})
                counts.append(count_sign_changes_exact(RationalFunctionExact(numerator, PolynomialExact((1,)))))
            return Outcome(counts, counts == list(range(9)))
        return check

    def normalisation(_):
        errors = {}
        for p in (Fraction(1), Fraction(3, 2), Fraction(2)):
            with mp.workdps(30):
                mass = mp.quad(lambda x: (1 + x * x) ** (-mp.mpf(p)), [-mp.inf, 0, mp.inf])
            errors[str(p)] = abs(bessel_transform(p)(np.array([1e-9]))[0].real - float(mass))
        worst = max(errors.values())
        return Outcome(f"max error {worst:.2e}", worst <= 1e-6, errors)

    def cauchy_phi(_):
        s = np.linspace(-50.0, 50.0, 10_001)
        error = float(np.max(np.abs(bessel_phi(1).values_np(s) - s / np.pi)))
        return Outcome(f"max error {error:.2e}", error <= 1e-9)

    def calibrated(_):
        target = bessel_transform(1)
        rep = calibrate_constants(bessel_phi(1), target)
        outcome = _transform_agreement(rep, target, (0.25, 1.0, 2.0, 4.0), 1e-6)
        outcome.passed = outcome.passed and abs(float(rep.b)) <= 1e-6
        outcome.witness["b"] = float(rep.b)
        return outcome

    claims = [
        Claim("exact-count", f"sign changes of (1 + x^2)^(p+n) f_p^(n), p = {p}, n <= 8", list(range(9)),
              "count_sign_changes_exact", polynomial_identity(p))
        for p in powers
    ]
    claims += [
        Claim("identity", "c_p normalisation: F(0+) equals the integral of f_p", "<= 1e-6", "bessel_transform",
              normalisation, provenance="derived"),
        Claim("identity", "Bessel phi at p = 1 equals s/pi", "<= 1e-9", "BesselArg", cauchy_phi,
              provenance="derived"),
        Claim("identity", "calibrated Bessel representation vs c_p |xi|^nu K_nu", "<= 1e-6",
              "calibrate_constants", calibrated, provenance="derived"),
        Claim("numeric-count", "bell test of e^(-|xi|), t = 0.1, n <= 8", list(range(9)), "bell_test",
              lambda opts: _bell_pass(cauchy_transform(1), 8, 0.1, opts), slow=True),
    ]
    return ExampleCase("6.4b", _BUILDERS["6.4b"][0], bessel_phi(1), claims)


@register("6.4c", "Functions x^-p e^(-1/x) on (0, inf)")
def _case_64c() -> ExampleCase:
    powers = (Fraction(1, 2), Fraction(1), Fraction(2))

    def identity(p):
        return lambda _: _all_roots_real_and_simple(hitting_time_numerators(p, 8), positive_only=True)

    claims = [
        Claim("exact-count", f"positive roots of e^(1/x) x^(p+2n) f_p^(n), p = {p}, n <= 8", list(range(9)),
              "isolate_real_roots", identity(p))
        for p in powers
    ]
    return ExampleCase("6.4c", _BUILDERS["6.4c"][0], powers, claims)


@register("6.4d", "Polya frequency functions g_m")
def _case_64d() -> ExampleCase:
    params = PolyaParams.geometric(1)

    def level_crossing(_):
        report = check_level_crossing(polya_phi(params, n_terms=20))
        return Outcome(report.passed, report.passed and not report.approximate, report)

    def moment(_):
        observed = {m: polya_phi_moment(PolyaParams.geometric(m)) for m in (1, 10)}
        return Outcome({m: str(v) for m, v in observed.items()},
                       all(v == Fraction(1, 6 * m * m) for m, v in observed.items()))

    def levy(_):
        x_nu = levy_density_exp_form(polya_phi(params, n_terms=10))
        expected = ExpPolySum.on_half_line([(1, 0, -(2 ** j)) for j in range(1, 11)])
        return Outcome(str(x_nu), x_nu == expected)

    def product(_):
        errors = {}
        for xi in (1.0, 10.0, 100.0):
            direct = complex(mp.fprod(1 / (1 + mp.mpc(0, xi) / 2 ** n) for n in range(1, 80)))
            errors[xi] = abs(polya_transform(params, xi) - direct)
        worst = max(errors.values())
        return Outcome(f"max error {worst:.2e}", worst <= 1e-9, errors)

    claims = [
        Claim("exact-count", "level crossing of the integer step phi_m", True, "check_level_crossing",
              level_crossing),
        Claim("exact-value", "integral of phi_m(s)/s^3 equals 1/(6 m^2)", "1/6, 1/600", "polya_phi_moment", moment,
              provenance="derived"),
        Claim("identity", "x nu_m(x) is a sum of e^(-z_j x)", "coefficients 1", "levy_density_exp_form", levy),
        Claim("identity", "regularised product vs direct product", "<= 1e-9", "polya_transform", product,
              provenance="derived"),
    ]
    return ExampleCase("6.4d", _BUILDERS["6.4d"][0], params, claims)


@register("6.5a", "Product of two Cauchy-type factors")
def _case_65a() -> ExampleCase:
    phi = two_pole_phi(1, 2)

    def monotone(_):
        s = np.linspace(-50.0, 50.0, 200_001)
        steps = np.diff(phi.values_np(s))
        smallest = float(np.min(steps))
        return Outcome(f"min increment {smallest:.2e}", smallest >= -1e-12)

    def level_crossing(_):
        report = check_level_crossing(phi, k_max=8)
        return Outcome(report.passed, report.passed, report)

    def calibrated(_):
        target = two_pole_transform(1, 2)
        rep = calibrate_constants(phi, target)
        outcome = _transform_agreement(rep, target, (0.25, 1.0, 2.0, 3.0, 5.0), 1e-5)
        outcome.passed = outcome.passed and abs(float(rep.b)) <= 1e-6
        outcome.witness["b"] = float(rep.b)
        outcome.witness["c"] = float(rep.c)
        return outcome

    claims = [
        Claim("identity", "phi non-decreasing on [-50, 50]", ">= 0", "TwoPoleArg", monotone),
        Claim("exact-count", "level crossing of phi (sampled)", True, "check_level_crossing", level_crossing),
        Claim("identity", "calibrated representation vs closed-form transform", "<= 1e-5", "calibrate_constants",
              calibrated, provenance="derived"),
        Claim("numeric-count", "bell test, t = 0.05, n <= 6", list(range(7)), "bell_test",
              lambda opts: _bell_pass(two_pole_transform(1, 2), 6, 0.05, opts), slow=True),
    ]
    return ExampleCase("6.5a", _BUILDERS["6.5a"][0], phi, claims)


@register("6.5b", "Rational function with 61 sign changes of the 57th derivative")
def _case_65b() -> ExampleCase:
    f = example_65_function()

    def order(n: int, expected: int):
        def check(_):
            count = count_sign_changes_exact(diff_rational(f, n))
            return Outcome(count, count == expected)
        return check

    claims = [
        Claim("exact-count", "sign changes of f'", 1, "count_sign_changes_exact", order(1, 1), provenance="trivial"),
        Claim("exact-count", "sign changes of f^(57)", 61, "count_sign_changes_exact", order(57, 61), slow=True),
    ]
    return ExampleCase("6.5b", _BUILDERS["6.5b"][0], f, claims)


@register("stable", "Stable laws")
def _case_stable() -> ExampleCase:
    indices = (Fraction(1, 2), Fraction(3, 2))

    def symmetric(_):
        imaginary = {f"{a}@{xi}": abs(stable_transform(a, 1, 1, xi).imag) for a in indices for xi in (0.5, 2.0)}
        worst = max(imaginary.values())
        return Outcome(f"max |Im| {worst:.2e}", worst <= 1e-12, imaginary)

    def boundary(_):
        try:
            stable_transform(2, 1, 1, 1.0)
        except InvalidIndex as exc:
            return Outcome("InvalidIndex", True, str(exc))
        return Outcome("accepted", False)

    def levy_law(opts):
        F = stable_fourier(Fraction(1, 2), 1 / (2 * math.sqrt(math.pi)), 0)
        errors = {}
        for x in (0.5, 1.0, 2.0):
            reference = x ** -1.5 * math.exp(-1 / (4 * x)) / (2 * math.sqrt(math.pi))
            errors[x] = abs(invert_transform(F, x, 0, 0.0, opts) - reference)
        worst = max(errors.values())
        return Outcome(f"max error {worst:.2e}", worst <= 1e-6, errors)

    claims = [
        Claim("identity", "c_+ = c_- gives a real transform", "Im = 0", "stable_transform", symmetric,
              provenance="trivial"),
        Claim("identity", "alpha = 2 is rejected", "InvalidIndex", "stable_transform", boundary, provenance="trivial"),
        Claim("numeric-count", "one-sided alpha = 1/2 law vs (4 pi)^-1/2 x^-3/2 e^(-1/(4x))", "<= 1e-6",
              "invert_transform", levy_law, provenance="derived", slow=True),
    ]
    claims += [
        Claim("numeric-count", f"bell test, alpha = {a}, c_+ = c_- = 1, t = 0.1, n <= 6", list(range(7)),
              "bell_test", (lambda a: lambda opts: _bell_pass(stable_fourier(a, 1, 1), 6, 0.1, opts))(a), slow=True)
        for a in indices
    ]
    return ExampleCase("stable", _BUILDERS["stable"][0], indices, claims)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def case_ids() -> List[str]:
    return list(_BUILDERS)


def get_case(case_id: str) -> ExampleCase:
    if case_id not in _BUILDERS:
        raise UnknownCase(f"Unknown case {case_id!r}; known cases: {', '.join(_BUILDERS)}")
    return _BUILDERS[case_id][1]()


def _run_claim(claim: Claim, opts: QuadratureOptions, include_slow: bool) -> ClaimResult:
    result = ClaimResult(claim.kind, claim.description, claim.method, claim.provenance, claim.expected,
                         observed=None, verdict="skipped")
    if claim.slow and not include_slow:
        return result
    start = time.perf_counter()
    try:
        outcome = claim.check(opts)
    except Exception as exc:  # reported, never propagated
        logger.warning("claim %r raised %s: %s", claim.description, type(exc).__name__, exc)
        result.verdict = "error"
        result.message = f"{type(exc).__name__}: {exc}"
        result.error_type = type(exc).__name__
        if isinstance(exc, (PrecisionExhausted, Unstable)) and getattr(exc, "report", None) is not None:
            result.witness = exc.report
    else:
        result.observed = outcome.observed
        result.witness = outcome.witness
        if outcome.passed:
            result.verdict = "pass"
        else:
            result.verdict = "inconclusive" if outcome.inconclusive else "fail"
    result.seconds = time.perf_counter() - start
    return result


def run_case(case_id: str, opts: Optional[QuadratureOptions] = None, include_slow: bool = True) -> CaseReport:
    """
    Evaluate every claim of one case.

    Claim exceptions are captured as "error" verdicts; slow claims are
    "skipped" unless include_slow.
    """
    opts = opts or QuadratureOptions.from_env()
    case = get_case(case_id)
    report = CaseReport(case.id, case.title)
    for claim in case.claims:
        result = _run_claim(claim, opts, include_slow)
        logger.info("[%s] %s", case.id, result.line())
        report.results.append(result)
    return report


def run_all(case_ids_: Optional[Sequence[str]] = None, opts: Optional[QuadratureOptions] = None,
            include_slow: bool = True, jobs: int = 1, show_progress: bool = False) -> SuiteReport:
    """Run cases (all by default), concurrently when jobs > 1; reports come back in catalog order."""
    selected = list(case_ids_) if case_ids_ else case_ids()
    for case_id in selected:
        if case_id not in _BUILDERS:
            raise UnknownCase(f"Unknown case {case_id!r}")
    opts = opts or QuadratureOptions.from_env()
    reports: Dict[str, CaseReport] = {}
    with tqdm(total=len(selected), desc="examples", disable=not show_progress) as progress:
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(run_case, cid, opts, include_slow): cid for cid in selected}
                for future in as_completed(futures):
                    reports[futures[future]] = future.result()
                    progress.update(1)
        else:
            for case_id in selected:
                reports[case_id] = run_case(case_id, opts, include_slow)
                progress.update(1)
    return SuiteReport([reports[cid] for cid in selected])
