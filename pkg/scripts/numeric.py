"""
Numeric Module

High-precision numerics on the Fourier side: Gaussian-damped inversion of
transforms, Gauss-Weierstrass convolution of exponential polynomials,
grid sign-change counting and the numeric bell test. Every verdict produced
here is numeric evidence; exact certificates live in exact_core.
"""

import logging
import math
import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import mp
from tqdm import tqdm

from .errors import (
    InvalidIndex,
    NonIntegrable,
    ToleranceNotMet,
    Unstable,
    UnsupportedFractionalPower,
)
from .exact_core import ExpPolySum, fraction_to_mpf
from .representation import (
    BellRepresentation,
    PhiFunction,
    StablePower,
    check_boundary_conditions,
    representation_transform,
    transform_from_representation,
)
from .transforms import FourierTransform

logger = logging.getLogger(__name__)

PRECISION_ENV = "BELLSHAPE_PRECISION"
TAIL_STRATEGIES = ("gaussian", "decay")

# t ladder for "sufficiently small t" searches
DEFAULT_T_LADDER = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

# Elements of the xi-by-x matrix evaluated at once
_CHUNK_ELEMENTS = 2_000_000
_EPS = np.finfo(float).eps


@dataclass
class QuadratureOptions:
    """
    Tolerances and precision for numeric inversion.

    Attributes:
    -----------
    abs_tol, rel_tol : float
        Requested absolute / relative accuracy of one inversion
    max_subdivisions : int
        Upper limit on quadrature subintervals
    working_dps : int
        Decimal digits for mpmath evaluations (>= 30)
    tail_strategy : str
        "gaussian" truncates at the damping envelope, "decay" at the
        transform's own decay
    sign_tolerance_factor : float
        Grid values within factor * (noise + truncation) of zero are not
        counted as signed
    max_precise_points : int
        Near-zero grid points re-evaluated at working_dps per order
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    working_dps: int = 30
    tail_strategy: str = "gaussian"
    sign_tolerance_factor: float = 1e3
    max_precise_points: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError(f"Tolerances must be positive, got abs={self.abs_tol}, rel={self.rel_tol}")
        if self.working_dps < 30:
            raise ValueError(f"Working precision must be at least 30 digits, got {self.working_dps}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be positive, got {self.max_subdivisions}")
        if self.tail_strategy not in TAIL_STRATEGIES:
            raise ValueError(f"Unknown tail strategy {self.tail_strategy!r}; choose from {TAIL_STRATEGIES}")

    @classmethod
    def from_env(cls, **overrides) -> "QuadratureOptions":
        """Defaults with working_dps taken from BELLSHAPE_PRECISION when set."""
        value = os.environ.get(PRECISION_ENV)
        if value and "working_dps" not in overrides:
            try:
                overrides["working_dps"] = int(value)
            except ValueError as exc:
                raise ValueError(f"{PRECISION_ENV} must be an integer, got {value!r}") from exc
        return cls(**overrides)


# ---------------------------------------------------------------------------
# Pointwise inversion
# ---------------------------------------------------------------------------

def _gaussian_cutoff(n: int, t: float, relative: float = 1e-17) -> float:
    """Xi beyond the peak of xi^n e^(-t xi^2) where the envelope drops below relative * peak."""
    peak = math.sqrt(n / (2 * t)) if n > 0 else 0.0
    log_envelope = (lambda xi: n * math.log(xi) - t * xi * xi) if n > 0 else (lambda xi: -t * xi * xi)
    target = (log_envelope(peak) if n > 0 else 0.0) + math.log(relative)
    lo = max(peak, math.sqrt(n / t) if n > 0 else 0.0, 1e-12)
    hi = max(2 * lo, 1.0)
    while log_envelope(hi) > target:
        hi *= 2
    for _ in range(80):
        mid = (lo + hi) / 2
        if log_envelope(mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _gaussian_tail_bound(n: int, t: float, cutoff: float, envelope: float) -> float:
    """Bound on (1/pi) integral over xi > cutoff of envelope * xi^n e^(-t xi^2)."""
    denominator = 2 * t * cutoff - n / cutoff
    if denominator <= 0:
        return math.inf
    return envelope * math.exp(n * math.log(cutoff) - t * cutoff * cutoff) / denominator / math.pi


def _decay_cutoff(F: FourierTransform, n: int, relative: float = 1e-17) -> Tuple[float, float]:
    """Xi where |xi^n F(i xi)| has fallen below relative times its running maximum."""
    xi = 1.0
    largest = abs(F.at_zero()) if n == 0 else 0.0
    below = 0
    while xi < 1e9:
        value = abs(xi ** n * F(np.array([xi]))[0])
        largest = max(largest, value)
        below = below + 1 if value <= relative * max(largest, 1e-300) else 0
        if below >= 2:
            return xi, value * xi
        xi *= 1.5
    raise NonIntegrable(f"{F.name}: no exponential decay detected up to xi = 1e9")


def invert_transform(F: FourierTransform, x, n: int = 0, t: float = 0.0,
                     opts: Optional[QuadratureOptions] = None) -> float:
    """
    (f * G_t)^(n)(x) from the transform F(i xi).

    Parameters:
    -----------
    F : FourierTransform
        Transform of f
    x : real
        Evaluation point
    n : int, default=0
        Derivative order (multiplier (i xi)^n)
    t : float, default=0
        Heat parameter of the Gauss-Weierstrass damping e^(-t xi^2)
    opts : QuadratureOptions, optional
        Tolerances and precision

    Returns:
    --------
    float
        (1/pi) Re of the integral over xi > 0 of (i xi)^n e^(-t xi^2) e^(i x xi) F(i xi)

    Notes:
    ------
    With t > 0 the integral is truncated where the Gaussian envelope bound
    falls below the tolerance and summed over subintervals of one
    oscillation period each. With t = 0 the transform must decay
    exponentially or faster than xi^-(n+1); oscillatory tails use mpmath's
    quadosc.
    """
    opts = opts or QuadratureOptions()
    if t < 0:
        raise ValueError(f"Heat parameter must be non-negative, got {t}")
    if n < 0:
        raise ValueError(f"Derivative order must be non-negative, got {n}")

    with mp.workdps(opts.working_dps):
        x_mp = fraction_to_mpf(x) if isinstance(x, Fraction) else mp.mpf(x)
        t_mp = mp.mpf(t)
        unit = mp.mpc(0, 1) ** n

        def integrand(xi):
            return mp.re(unit * xi ** n * mp.exp(-t_mp * xi * xi) * mp.expj(x_mp * xi) * F.mp_func(xi))

        if t > 0 and opts.tail_strategy == "gaussian":
            cutoff = _gaussian_cutoff(n, t, relative=min(opts.abs_tol, 1e-17))
        elif F.exponential_decay:
            cutoff, _ = _decay_cutoff(F, n, relative=min(opts.abs_tol, 1e-17))
        elif F.decay > n + 1:
            if x == 0:
                value = mp.quad(integrand, [0, 1, mp.inf])
            else:
                value = mp.quadosc(integrand, [0, mp.inf], omega=abs(x_mp))
            return float(value / mp.pi)
        else:
            raise NonIntegrable(
                f"{F.name}: (i xi)^{n} F(i xi) is not absolutely integrable without damping (decay {F.decay})"
            )

        period = 2 * math.pi / max(abs(float(x)), 1.0)
        segments = min(opts.max_subdivisions, max(8, int(math.ceil(cutoff / period))))
        nodes = [mp.mpf(cutoff) * k / segments for k in range(segments + 1)]
        value, error = mp.quad(integrand, nodes, error=True)
        value /= mp.pi
        error /= mp.pi
        tolerance = max(opts.abs_tol, opts.rel_tol * abs(value))
        if error > tolerance:
            raise ToleranceNotMet(
                f"{F.name}: error estimate {mp.nstr(error, 3)} above tolerance {tolerance:.1e} at x={x}, n={n}, t={t}"
            )
        return float(value)


# ---------------------------------------------------------------------------
# Grid inversion
# ---------------------------------------------------------------------------

@dataclass
class GridInversion:
    """Values of (f * G_t)^(n) on a grid with their noise and truncation levels."""

    x: np.ndarray
    values: np.ndarray
    noise: float
    truncation: float
    step: float
    cutoff: float

    @property
    def tolerance(self) -> float:
        return self.noise + self.truncation


def estimate_location_scale(F: FourierTransform, t: float = 0.0, h: float = 0.05) -> Tuple[float, float]:
    """Mean and effective width of f * G_t from the curvature of log F at 0."""
    origin = F.at_zero()
    if abs(origin) == 0 or not np.isfinite(origin):
        return 0.0, max(1.0, math.sqrt(2 * t))
    ratio = F(np.array([h]))[0] / origin
    if ratio == 0 or not np.isfinite(ratio):
        return 0.0, max(1.0, math.sqrt(2 * t))
    log_ratio = np.log(ratio)
    mean = float(-log_ratio.imag / h)
    variance = max(float(-2 * log_ratio.real / h ** 2), 0.0) + 2 * t
    return mean, max(math.sqrt(variance), 1e-2)


def invert_transform_grid(F: FourierTransform, x: Sequence[float], n: int = 0, t: float = 0.0,
                          opts: Optional[QuadratureOptions] = None) -> GridInversion:
    """
    (f * G_t)^(n) on a whole grid by trapezoidal summation over xi > 0.

    Parameters:
    -----------
    F : FourierTransform
        Transform of f
    x : Sequence[float]
        Evaluation points
    n : int, default=0
        Derivative order
    t : float, default=0
        Heat parameter; t = 0 requires exponential decay of F
    opts : QuadratureOptions, optional
        Tolerances and precision

    Returns:
    --------
    GridInversion
        Values together with the rounding-noise and truncation levels

    Notes:
    ------
    This is the trapezoidal rule on a uniform xi grid, not tanh-sinh: the
    damped integrand is smooth and decays like e^(-t xi^2), where uniform
    steps converge geometrically and one set of nodes serves every x.
    Points that need more accuracy go through invert_transform (mpmath
    tanh-sinh) in bell_test. The step is h = 2 pi / L with period
    L = 4 span + 40 sigma_eff, so aliased copies of f lie far from the
    grid. Hermitian symmetry halves the sum and makes the output real.
    """
    opts = opts or QuadratureOptions()
    x = np.asarray(x, dtype=float)
    mean, sigma = estimate_location_scale(F, t)
    span = float(np.max(x) - np.min(x)) if x.size > 1 else 1.0
    period = 4 * (span + abs(mean - float(np.mean(x)))) + 40 * sigma
    step = 2 * math.pi / period

    if t > 0:
        cutoff = _gaussian_cutoff(n, t)
    elif F.exponential_decay:
        cutoff, _ = _decay_cutoff(F, n)
    else:
        raise NonIntegrable(f"{F.name}: grid inversion at t = 0 needs exponential decay")

    xi = np.arange(0.0, cutoff + step, step)
    transform = F(xi)
    transform[0] = F.at_zero()
    weights = np.full(xi.shape, step)
    weights[0] = step / 2
    u = (1j * xi) ** n * np.exp(-t * xi * xi) * transform * weights

    envelope = float(np.max(np.abs(transform))) if transform.size else 0.0
    truncation = _gaussian_tail_bound(n, t, cutoff, envelope) if t > 0 else float(np.abs(u[-1]) / step * cutoff)
    noise = 64 * _EPS * float(np.sum(np.abs(u))) / math.pi

    values = np.empty(x.shape)
    chunk = max(1, _CHUNK_ELEMENTS // max(xi.size, 1))
    for start in range(0, x.size, chunk):
        block = x[start:start + chunk]
        phases = np.exp(1j * np.outer(block, xi))
        values[start:start + chunk] = (phases @ u).real / math.pi
    logger.debug("grid inversion: %d nodes, step %.3e, cutoff %.3e, noise %.2e", xi.size, step, cutoff, noise)
    return GridInversion(x, values, noise, truncation, step, cutoff)


# ---------------------------------------------------------------------------
# Heat-kernel convolution
# ---------------------------------------------------------------------------

def heat_kernel(x, t):
    """G_t(x) = (4 pi t)^(-1/2) e^(-x^2 / (4 t)) at the current mpmath precision."""
    return mp.exp(-x * x / (4 * t)) / mp.sqrt(4 * mp.pi * t)


def _truncated_gaussian_moments(a, b, t, order: int) -> List:
    """M_j = integral of u^j G_t(u) over (a, b) for j <= order."""
    scale = 2 * mp.sqrt(t)

    def boundary(u, j):
        if mp.isinf(u):
            return mp.mpf(0)
        return u ** j * heat_kernel(u, t)

    moments = [(mp.erf(b / scale) - mp.erf(a / scale)) / 2]
    if order >= 1:
        moments.append(-2 * t * (boundary(b, 0) - boundary(a, 0)))
    for j in range(2, order + 1):
        moments.append(-2 * t * (boundary(b, j - 1) - boundary(a, j - 1)) + 2 * t * (j - 1) * moments[j - 2])
    return moments


def convolve_gauss_exact_form(f: ExpPolySum, t, x, dps: int = 30) -> float:
    """
    (f * G_t)(x) in closed form for terms c y^k e^(lambda y) with integer k >= 0.

    Completing the square gives e^(lambda x + lambda^2 t) times the integral
    of y^k G_t(y - m) with m = x + 2 lambda t, expanded into truncated
    Gaussian moments (error-function antiderivatives).
    """
    if t <= 0:
        raise ValueError(f"Heat parameter must be positive, got {t}")
    for piece in f.pieces:
        for term in piece.terms:
            if term.power.denominator != 1 or term.power < 0:
                raise UnsupportedFractionalPower(
                    f"Closed-form convolution needs integer powers >= 0, got x^{term.power}"
                )
    with mp.workdps(dps):
        t_mp = mp.mpf(t)
        x_mp = fraction_to_mpf(x) if isinstance(x, Fraction) else mp.mpf(x)
        total = mp.mpf(0)
        for piece in f.pieces:
            lo, hi = fraction_to_mpf(piece.lo), fraction_to_mpf(piece.hi)
            for term in piece.terms:
                k = int(term.power)
                rate = fraction_to_mpf(term.rate)
                centre = x_mp + 2 * rate * t_mp
                moments = _truncated_gaussian_moments(lo - centre, hi - centre, t_mp, k)
                polynomial = mp.fsum(mp.binomial(k, j) * centre ** (k - j) * moments[j] for j in range(k + 1))
                prefactor = fraction_to_mpf(term.coefficient) * mp.pi ** (mp.mpf(term.pi_power) / 2)
                total += prefactor * mp.exp(rate * x_mp + rate * rate * t_mp) * polynomial
        return float(total)


def convolve_gauss_quadrature(f: Callable, t, x, support: Tuple = (-math.inf, math.inf), dps: int = 30) -> float:
    """(f * G_t)(x) by tanh-sinh quadrature of f(y) G_t(x - y) over the support of f."""
    if t <= 0:
        raise ValueError(f"Heat parameter must be positive, got {t}")
    with mp.workdps(dps):
        t_mp, x_mp = mp.mpf(t), mp.mpf(x)
        lo, hi = (fraction_to_mpf(e) if not isinstance(e, float) or math.isinf(e) else mp.mpf(e) for e in support)
        nodes = [lo] + [p for p in (x_mp,) if lo < p < hi] + [hi]
        return float(mp.quad(lambda y: f(y) * heat_kernel(x_mp - y, t_mp), nodes))


# ---------------------------------------------------------------------------
# Sign changes on grids
# ---------------------------------------------------------------------------

def count_sign_changes_grid(values: Sequence[Tuple[float, float]], tol: Union[float, Sequence[float]]) -> int:
    """
    Alternations among grid values with |value| > tol.

    A lower bound for the sign changes of the sampled function. tol may be
    one threshold or one per point.
    """
    points = np.array([p for p, _ in values], dtype=float)
    samples = np.array([v for _, v in values], dtype=float)
    if points.size > 1 and np.any(np.diff(points) <= 0):
        raise ValueError("Grid points must be strictly increasing")
    return _alternations(samples, np.broadcast_to(np.asarray(tol, dtype=float), samples.shape))


def _alternations(samples: np.ndarray, tol: np.ndarray) -> int:
    signs = np.where(np.abs(samples) > tol, np.sign(samples), 0)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _flip_pairs(samples: np.ndarray, tol: np.ndarray) -> List[Tuple[int, int]]:
    """Index pairs (i, j) of consecutive reliable samples with opposite signs."""
    reliable = np.flatnonzero(np.abs(samples) > tol)
    pairs = []
    for i, j in zip(reliable, reliable[1:]):
        if np.sign(samples[i]) != np.sign(samples[j]):
            pairs.append((int(i), int(j)))
    return pairs


# ---------------------------------------------------------------------------
# Bell test
# ---------------------------------------------------------------------------

@dataclass
class GridSpec:
    """
    Default evaluation grid.

    A broad uniform grid of `points` nodes over mean +- sigmas * sigma_eff,
    merged with zoom grids of `zoom_points` nodes over c +- zoom_width *
    sqrt(t) around each zoom centre. `explicit` replaces both. Points in
    `precise` are always added and always evaluated by adaptive quadrature.
    """

    points: int = 2001
    sigmas: float = 12.0
    zoom_centres: Tuple[float, ...] = (0.0,)
    zoom_width: float = 40.0
    zoom_points: int = 2001
    max_refinements: int = 6
    explicit: Optional[Tuple[float, ...]] = None
    precise: Tuple[float, ...] = ()

    def build(self, F: FourierTransform, t: float) -> np.ndarray:
        forced = np.asarray(self.precise, dtype=float)
        if self.explicit is not None:
            return np.unique(np.concatenate([np.asarray(self.explicit, dtype=float), forced]))
        mean, sigma = estimate_location_scale(F, t)
        parts = [np.linspace(mean - self.sigmas * sigma, mean + self.sigmas * sigma, self.points)]
        if t > 0:
            width = self.zoom_width * math.sqrt(t)
            for centre in self.zoom_centres:
                parts.append(np.linspace(centre - width, centre + width, self.zoom_points))
        parts.append(forced)
        return np.unique(np.concatenate(parts))


@dataclass
class OrderResult:
    """Sign-change count of (f * G_t)^(n) with the evidence behind it."""

    n: int
    count: int
    expected: int
    verdict: str
    grid_size: int
    tolerance: float
    min_abs_at_crossings: Optional[float]
    crossings: List[float] = field(default_factory=list)
    level_counts: List[int] = field(default_factory=list)
    precise_points: int = 0

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class BellTestReport:
    """Per-order results of a numeric bell test at one heat parameter t."""

    transform: str
    t: float
    orders: List[OrderResult] = field(default_factory=list)
    boundary_conditions: Optional[Dict] = None
    label: str = "numeric evidence"

    @property
    def passed(self) -> bool:
        return bool(self.orders) and all(o.verdict == "pass" for o in self.orders)

    @property
    def verdict(self) -> str:
        if any(o.verdict == "unstable" for o in self.orders):
            return "unstable"
        return "pass" if self.passed else "fail"

    def order(self, n: int) -> OrderResult:
        for result in self.orders:
            if result.n == n:
                return result
        raise KeyError(n)

    def to_dict(self) -> Dict:
        return {
            "transform": self.transform,
            "t": self.t,
            "label": self.label,
            "verdict": self.verdict,
            "boundary_conditions": self.boundary_conditions,
            "orders": [o.to_dict() for o in self.orders],
        }


def _precise_values(F: FourierTransform, points: np.ndarray, n: int, t: float,
                    opts: QuadratureOptions) -> np.ndarray:
    return np.array([invert_transform(F, float(p), n, t, opts) for p in points])


def _evaluate(F: FourierTransform, x: np.ndarray, n: int, t: float, opts: QuadratureOptions,
              budget: List[int], forced: Sequence[float] = ()) -> Tuple[np.ndarray, np.ndarray, float]:
    """Grid values, per-point thresholds, and the grid threshold."""
    grid = invert_transform_grid(F, x, n, t, opts)
    threshold = opts.sign_tolerance_factor * grid.tolerance
    values = grid.values.copy()
    tolerances = np.full(values.shape, threshold)

    precise = np.isin(x, np.asarray(forced, dtype=float))
    if precise.any():
        values[precise] = _precise_values(F, x[precise], n, t, opts)
        tolerances[precise] = opts.sign_tolerance_factor * opts.abs_tol
    murky = np.flatnonzero((np.abs(values) <= tolerances) & ~precise)
    signal = np.flatnonzero(np.abs(values) > tolerances)
    if murky.size and signal.size and budget[0] > 0 and t > 0:
        inside = murky[(murky > signal[0]) & (murky < signal[-1])]
        if inside.size:
            chosen = inside[np.unique(np.linspace(0, inside.size - 1, min(budget[0], inside.size)).astype(int))]
            values[chosen] = _precise_values(F, x[chosen], n, t, opts)
            tolerances[chosen] = opts.sign_tolerance_factor * opts.abs_tol
            budget[0] -= chosen.size
            logger.debug("re-evaluated %d near-zero points at %d digits", chosen.size, opts.working_dps)
    return values, tolerances, threshold


def _test_order(F: FourierTransform, n: int, t: float, x0: np.ndarray, layout: GridSpec,
                opts: QuadratureOptions) -> OrderResult:
    budget = [opts.max_precise_points]
    x = x0
    values, tolerances, threshold = _evaluate(F, x, n, t, opts, budget, layout.precise)
    counts = [_alternations(values, tolerances)]

    stable = False
    for level in range(layout.max_refinements):
        pairs = _flip_pairs(values, tolerances)
        new_points = []
        for i, j in pairs:
            lo, hi = max(i - 2, 0), min(j + 2, x.size - 1)
            new_points.append((x[lo:hi] + x[lo + 1:hi + 1]) / 2)
        if not new_points:
            counts.append(counts[-1])
        else:
            extra = np.setdiff1d(np.unique(np.concatenate(new_points)), x)
            extra_values, extra_tol, _ = _evaluate(F, extra, n, t, opts, budget)
            order = np.argsort(np.concatenate([x, extra]))
            x = np.concatenate([x, extra])[order]
            values = np.concatenate([values, extra_values])[order]
            tolerances = np.concatenate([tolerances, extra_tol])[order]
            counts.append(_alternations(values, tolerances))
        logger.debug("order %d refinement %d: %d sign changes on %d points", n, level + 1, counts[-1], x.size)
        if len(counts) >= 3 and counts[-1] == counts[-2] == counts[-3]:
            stable = True
            break

    pairs = _flip_pairs(values, tolerances)
    crossings = [float((x[i] + x[j]) / 2) for i, j in pairs]
    smallest = min((min(abs(values[i]), abs(values[j])) for i, j in pairs), default=None)
    count = counts[-1]
    verdict = ("pass" if count == n else "fail") if stable else "unstable"
    return OrderResult(
        n=n,
        count=count,
        expected=n,
        verdict=verdict,
        grid_size=int(x.size),
        tolerance=threshold,
        min_abs_at_crossings=float(smallest) if smallest is not None else None,
        crossings=crossings,
        level_counts=counts,
        precise_points=opts.max_precise_points - budget[0],
    )


def bell_test(F: FourierTransform, n_max: int, t: float, grid: Optional[GridSpec] = None,
              opts: Optional[QuadratureOptions] = None, orders: Optional[Sequence[int]] = None,
              show_progress: bool = False, check_boundary: bool = True) -> BellTestReport:
    """
    Count the sign changes of (f * G_t)^(n) for n = 0..n_max.

    Parameters:
    -----------
    F : FourierTransform
        Transform of f
    n_max : int
        Largest derivative order
    t : float
        Heat parameter, t > 0
    grid : GridSpec, optional
        Evaluation grid; refinement doubles the density near crossings
    opts : QuadratureOptions, optional
        Tolerances and precision
    orders : Sequence[int], optional
        Explicit orders instead of 0..n_max
    show_progress : bool, default=False
        Show a tqdm bar over orders

    Returns:
    --------
    BellTestReport
        Counts and verdicts; an order passes when its count equals n

    Raises:
    -------
    Unstable
        When the count of some order changes across every refinement
        level; the partial report is attached as .report
    """
    if t <= 0:
        raise ValueError(f"Bell tests need t > 0, got {t}")
    opts = opts or QuadratureOptions()
    layout = grid or GridSpec()
    report = BellTestReport(transform=F.name, t=t)
    if check_boundary:
        boundary = check_boundary_conditions(F)
        report.boundary_conditions = boundary.to_dict()
        if not boundary.satisfied:
            logger.warning("%s: boundary conditions not supported by numeric evidence", F.name)

    x0 = layout.build(F, t)
    selected = list(orders) if orders is not None else list(range(n_max + 1))
    for n in tqdm(selected, desc=f"bell test t={t:g}", disable=not show_progress):
        result = _test_order(F, n, t, x0, layout, opts)
        report.orders.append(result)
        logger.info("%s t=%g n=%d: %d sign changes (%s)", F.name, t, n, result.count, result.verdict)
        if result.verdict == "unstable":
            raise Unstable(f"Sign-change count for n={n} did not stabilise: {result.level_counts}", report)
    return report


@dataclass
class FailureWitness:
    """First heat parameter at which an order shows at least the claimed count."""

    t: float
    result: OrderResult
    tried: List[Tuple[float, Optional[int]]]


def find_failure_witness(F: FourierTransform, n: int, minimum_count: int,
                         ladder: Sequence[float] = DEFAULT_T_LADDER, grid: Optional[GridSpec] = None,
                         opts: Optional[QuadratureOptions] = None) -> Optional[FailureWitness]:
    """
    Descend t through the ladder until (f * G_t)^(n) shows >= minimum_count sign changes.

    Returns None when no rung of the ladder produces a witness; unstable
    rungs are skipped and recorded with count None.
    """
    tried: List[Tuple[float, Optional[int]]] = []
    for t in ladder:
        try:
            report = bell_test(F, n, t, grid=grid, opts=opts, orders=[n], check_boundary=False)
        except Unstable as exc:
            logger.info("t=%g: unstable (%s)", t, exc)
            tried.append((t, None))
            continue
        result = report.order(n)
        tried.append((t, result.count))
        if result.count >= minimum_count:
            logger.info("witness at t=%g: %d sign changes for n=%d", t, result.count, n)
            return FailureWitness(t, result, tried)
    return None


# ---------------------------------------------------------------------------
# Stable laws
# ---------------------------------------------------------------------------

def stable_representation(alpha, c_plus, c_minus, normalise: bool = False) -> BellRepresentation:
    """
    Representation of the stable law with Levy density c_+- |x|^(-1-alpha).

    normalise removes the constant and drift produced by the power-law
    integral, leaving exp(-pi (c_+ z^alpha + c_- (-z)^alpha) / (sin(pi alpha) Gamma(1+alpha)))
    (exp(c_+ z log z + c_- (-z) log(-z)) at alpha = 1).
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 2:
        raise InvalidIndex(f"Stable index must lie in (0, 2), got {alpha}")
    c_plus, c_minus = Fraction(c_plus), Fraction(c_minus)
    if c_plus < 0 or c_minus < 0 or c_plus + c_minus == 0:
        raise ValueError(f"Need c_plus, c_minus >= 0 with c_plus + c_minus > 0, got {c_plus}, {c_minus}")
    phi: PhiFunction = StablePower(c_plus, c_minus, alpha).phi()
    if not normalise:
        return BellRepresentation(a=0, b=0, c=0, phi=phi)
    gamma = math.gamma(1 + float(alpha))
    c = -float(c_plus + c_minus) / (float(alpha) * gamma)
    b = 0.0 if alpha == 1 else float(c_plus - c_minus) / ((1 - float(alpha)) * gamma)
    return BellRepresentation(a=0, b=b, c=c, phi=phi)


def stable_transform(alpha, c_plus, c_minus, xi, normalise: bool = False, dps: int = 30) -> complex:
    """Transform of a stable law at xi through the power-law representation."""
    return transform_from_representation(stable_representation(alpha, c_plus, c_minus, normalise), xi, dps)


def stable_fourier(alpha, c_plus, c_minus, normalise: bool = True) -> FourierTransform:
    """Vectorised FourierTransform of a stable law."""
    rep = stable_representation(alpha, c_plus, c_minus, normalise)
    transform = representation_transform(rep, name=f"stable(alpha={alpha}, c+={c_plus}, c-={c_minus})")
    if normalise:
        transform.value_at_zero = 1 + 0j
    return transform
