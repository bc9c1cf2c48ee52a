"""
Representation Module

Fourier-side data model of bell-shaped functions. A representation
(a, b, c, phi) encodes

    F(i xi) = exp(-a xi^2 - i b xi + c + integral K(i xi, s) phi(s) ds),
    K(z, s) = 1/(z + s) - (1/s - z/s^2) 1_{|s| >= 1},

and this module provides the checkers for the conditions on phi (level
crossing, tail integrability, boundary behaviour), the decomposition of phi
into a Stieltjes part and an integer-valued Polya part, Polya frequency and
Stieltjes transforms, and the Laplace duality between phi and the Levy
density nu.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from mpmath import mp
from scipy import optimize, special
from scipy.integrate import trapezoid

from .errors import (
    DivergentLaplace,
    DivergentRepresentation,
    LevelCrossingViolated,
    NotExpRepresentable,
    PoleHit,
)
from .exact_core import (
    ExpPolySum,
    LogCombination,
    count_alternations,
    fraction_to_mpf,
    from_sympy_rational,
    to_sympy_rational,
)
from .transforms import FourierTransform

logger = logging.getLogger(__name__)

Endpoint = Union[Fraction, float]
Constant = Union[Fraction, float, LogCombination]

INF = math.inf

# k_max used when phi is unbounded on the represented pieces
DEFAULT_UNBOUNDED_KMAX = 16
# Grid density for analytic pieces without a monotonicity certificate
GRID_POINTS_PER_DECADE = 10_000
GRID_RANGE = (1e-6, 1e6)
# Upper limit on the number of integer levels produced by decompose_phi
MAX_LEVELS = 256

# Oscillating analytic pieces are integrated period by period up to this distance
OSCILLATION_SPAN = 400.0


def as_endpoint(value) -> Endpoint:
    """Fraction for finite endpoints, +-inf float for infinite ones."""
    if isinstance(value, float) and math.isinf(value):
        return value
    if isinstance(value, str) and value.strip().lstrip("+-") in ("inf", "infinity"):
        return -INF if value.strip().startswith("-") else INF
    return Fraction(value)


def _representative(lo: Endpoint, hi: Endpoint) -> Fraction:
    """A point inside (lo, hi) usable for lookups."""
    if lo == -INF and hi == INF:
        return Fraction(0)
    if lo == -INF:
        return hi - 1
    if hi == INF:
        return lo + 1
    return (lo + hi) / 2


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def _as_constant(value) -> Constant:
    if isinstance(value, (LogCombination, float)):
        return value
    return LogCombination.coerce(value)


def constant_to_mpf(value: Constant, dps: int = 30):
    if isinstance(value, LogCombination):
        return value.to_mpf(dps)
    if isinstance(value, float):
        return mp.mpf(value)
    return fraction_to_mpf(value)


# ---------------------------------------------------------------------------
# Pieces of phi
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepPiece:
    """Constant value on the right-open interval [lo, hi)."""

    lo: Endpoint
    hi: Endpoint
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_endpoint(self.lo))
        object.__setattr__(self, "hi", as_endpoint(self.hi))
        object.__setattr__(self, "value", Fraction(self.value))
        if not self.lo < self.hi:
            raise ValueError(f"Step piece needs lo < hi, got [{self.lo}, {self.hi})")

    def contains(self, s) -> bool:
        return self.lo <= s < self.hi


class AnalyticPiece:
    """
    Closed-form piece of phi on [lo, hi), minus a rational shift.

    Subclasses are frozen dataclasses declaring lo, hi, their parameters and
    shift. Supports never straddle s = 0.
    """

    kind: ClassVar[str] = "analytic"
    # True when values at rational points and monotonicity are known exactly
    certified: ClassVar[bool] = False
    # oscillation period of the formula, used to split quadrature on unbounded supports
    period: ClassVar[Optional[float]] = None

    def _validate(self):
        object.__setattr__(self, "lo", as_endpoint(self.lo))
        object.__setattr__(self, "hi", as_endpoint(self.hi))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if not self.lo < self.hi:
            raise ValueError(f"{self.kind} piece needs lo < hi, got [{self.lo}, {self.hi})")
        if self.lo < 0 < self.hi:
            raise ValueError(f"{self.kind} piece [{self.lo}, {self.hi}) straddles 0; split it at 0")

    @property
    def increasing(self) -> bool:
        return True

    def raw_mp(self, s):
        raise NotImplementedError

    def raw_np(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def raw_limit(self, endpoint: Endpoint):
        """Limit of the unshifted formula at a support endpoint."""
        if math.isinf(endpoint):
            return endpoint if self.increasing else -endpoint
        return float(self.raw_np(np.array([float(endpoint)]))[0])

    def value_mp(self, s):
        return self.raw_mp(s) - fraction_to_mpf(self.shift)

    def value_np(self, s: np.ndarray) -> np.ndarray:
        return self.raw_np(s) - float(self.shift)

    def limits(self) -> Tuple:
        return self.raw_limit(self.lo) - self.shift, self.raw_limit(self.hi) - self.shift

    def contains(self, s) -> bool:
        return self.lo <= s < self.hi

    def inverse(self, level) -> Endpoint:
        """Point of the support where the shifted value equals level."""
        target = float(level)
        lo = float(self.lo) if not math.isinf(self.lo) else None
        hi = float(self.hi) if not math.isinf(self.hi) else None
        a = lo if lo is not None else (hi if hi is not None else 0.0) - 1.0
        b = hi if hi is not None else a + 1.0
        while lo is None and self.value_np(np.array([a]))[0] > target:
            a = 2 * a - 1.0
        while hi is None and self.value_np(np.array([b]))[0] < target:
            b = 2 * b + 1.0
        root = optimize.brentq(lambda s: self.value_np(np.array([s]))[0] - target, a, b, xtol=1e-15)
        return Fraction(root)

    def restrict(self, lo: Endpoint, hi: Endpoint, extra_shift=Fraction(0)) -> "AnalyticPiece":
        return replace(self, lo=lo, hi=hi, shift=self.shift + Fraction(extra_shift))

    def params(self) -> Dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLaw(AnalyticPiece):
    """sign(s) * coefficient * |s|^exponent / Gamma(1 + exponent), the phi of a stable law."""

    lo: Endpoint
    hi: Endpoint
    coefficient: Fraction
    exponent: Fraction
    shift: Fraction = Fraction(0)

    kind = "power_law"
    certified = True

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.coefficient < 0:
            raise ValueError(f"Power-law coefficient must be non-negative, got {self.coefficient}")
        if self.exponent <= 0:
            raise ValueError(f"Power-law exponent must be positive, got {self.exponent}")
        self._validate()

    @property
    def gamma(self) -> float:
        return math.gamma(1 + float(self.exponent))

    def raw_np(self, s):
        s = np.asarray(s, dtype=float)
        return np.sign(s) * float(self.coefficient) * np.abs(s) ** float(self.exponent) / self.gamma

    def raw_mp(self, s):
        alpha = fraction_to_mpf(self.exponent)
        return mp.sign(s) * fraction_to_mpf(self.coefficient) * mp.power(abs(s), alpha) / mp.gamma(1 + alpha)

    def raw_limit(self, endpoint):
        if math.isinf(endpoint):
            return 0.0 if self.coefficient == 0 else endpoint
        return super().raw_limit(endpoint)

    def inverse(self, level) -> Endpoint:
        target = Fraction(level) + self.shift
        if target == 0:
            return Fraction(0)
        magnitude = (abs(float(target)) * self.gamma / float(self.coefficient)) ** (1 / float(self.exponent))
        return Fraction(math.copysign(magnitude, float(target)))

    @property
    def full_half_line(self) -> bool:
        return self.shift == 0 and ((self.lo == 0 and self.hi == INF) or (self.lo == -INF and self.hi == 0))

    def params(self) -> Dict:
        return {"coefficient": self.coefficient, "exponent": self.exponent}


@dataclass(frozen=True)
class LinearRamp(AnalyticPiece):
    """slope * s + intercept; exact at rational points."""

    lo: Endpoint
    hi: Endpoint
    slope: Fraction
    intercept: Fraction = Fraction(0)
    shift: Fraction = Fraction(0)

    kind = "linear"
    certified = True

    def __post_init__(self):
        object.__setattr__(self, "slope", Fraction(self.slope))
        object.__setattr__(self, "intercept", Fraction(self.intercept))
        if self.slope == 0:
            raise ValueError("A constant linear piece must be written as a step piece")
        self._validate()

    @property
    def increasing(self) -> bool:
        return self.slope > 0

    def raw_np(self, s):
        return float(self.slope) * np.asarray(s, dtype=float) + float(self.intercept)

    def raw_mp(self, s):
        return fraction_to_mpf(self.slope) * s + fraction_to_mpf(self.intercept)

    def raw_limit(self, endpoint):
        if math.isinf(endpoint):
            return endpoint if self.slope > 0 else -endpoint
        return self.slope * endpoint + self.intercept

    def inverse(self, level) -> Endpoint:
        return (Fraction(level) + self.shift - self.intercept) / self.slope

    def params(self) -> Dict:
        return {"slope": self.slope, "intercept": self.intercept}


@dataclass(frozen=True)
class TwoPoleArg(AnalyticPiece):
    """
    (p s + Arg(q - p e^(i (q - p) s))) / pi, the continuous argument of
    q e^(ips) - p e^(iqs) divided by pi.
    """

    lo: Endpoint
    hi: Endpoint
    p: Fraction
    q: Fraction
    shift: Fraction = Fraction(0)

    kind = "two_pole_arg"

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if not 0 < self.p < self.q:
            raise ValueError(f"Two-pole argument needs 0 < p < q, got p={self.p}, q={self.q}")
        self._validate()

    def raw_np(self, s):
        s = np.asarray(s, dtype=float)
        p, q = float(self.p), float(self.q)
        return (p * s + np.angle(q - p * np.exp(1j * (q - p) * s))) / np.pi

    def raw_mp(self, s):
        p, q = fraction_to_mpf(self.p), fraction_to_mpf(self.q)
        return (p * s + mp.arg(q - p * mp.expj((q - p) * s))) / mp.pi

    @property
    def period(self) -> float:
        return 2 * math.pi / float(self.q - self.p)

    def params(self) -> Dict:
        return {"p": self.p, "q": self.q}


@lru_cache(maxsize=16)
def _bessel_phase_table(nu: float) -> Tuple[np.ndarray, np.ndarray]:
    """Continuous argument of i J_nu(s) - Y_nu(s) on a dense grid of s > 0."""
    grid = np.concatenate([np.geomspace(1e-8, 1.0, 4000, endpoint=False), np.linspace(1.0, 400.0, 160_000)])
    phase = np.unwrap(np.angle(-special.yv(nu, grid) + 1j * special.jv(nu, grid)))
    return np.concatenate([[0.0], grid]), np.concatenate([[0.0], phase])


@dataclass(frozen=True)
class BesselArg(AnalyticPiece):
    """
    sign(s) * arg(i J_nu(|s|) - Y_nu(|s|)) / pi with nu = p - 1/2, the phi of (1 + x^2)^-p.

    The argument is continuous and vanishes at s = 0; beyond the tabulated
    range the Hankel phase asymptotics are used.
    """

    lo: Endpoint
    hi: Endpoint
    p: Fraction
    shift: Fraction = Fraction(0)

    kind = "bessel_arg"

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p <= Fraction(1, 2):
            raise ValueError(f"Bessel argument needs p > 1/2, got {self.p}")
        self._validate()

    def _phase(self, a: np.ndarray) -> np.ndarray:
        nu = float(self.p) - 0.5
        grid, phase = _bessel_phase_table(nu)
        out = np.interp(a, grid, phase)
        far = a > grid[-1]
        if np.any(far):
            mu = 4 * nu * nu
            s_end = grid[-1]
            out[far] = phase[-1] + (a[far] - s_end) + (mu - 1) / 8 * (1 / a[far] - 1 / s_end)
        return out

    def raw_np(self, s):
        s = np.asarray(s, dtype=float)
        return np.sign(s) * self._phase(np.abs(s)) / np.pi

    def raw_mp(self, s):
        return mp.mpf(float(self.raw_np(np.array([float(s)]))[0]))

    def raw_limit(self, endpoint):
        if endpoint == 0:
            return 0.0
        return super().raw_limit(endpoint)

    def params(self) -> Dict:
        return {"p": self.p}


ANALYTIC_KINDS = {cls.kind: cls for cls in (PowerLaw, LinearRamp, TwoPoleArg, BesselArg)}

Piece = Union[StepPiece, AnalyticPiece]


def _canonical_steps(steps: Sequence[StepPiece]) -> Tuple[StepPiece, ...]:
    ordered = sorted((p for p in steps if p.value != 0), key=lambda p: p.lo)
    merged: List[StepPiece] = []
    for piece in ordered:
        if merged and merged[-1].hi == piece.lo and merged[-1].value == piece.value:
            merged[-1] = StepPiece(merged[-1].lo, piece.hi, piece.value)
        else:
            merged.append(piece)
    return tuple(merged)


@dataclass(frozen=True)
class PhiFunction:
    """
    Step pieces plus analytic pieces with disjoint supports; zero elsewhere.

    Step pieces are right-open [lo, hi). The step part is canonical (zero
    values dropped, equal neighbours merged), so step-only functions compare
    by value. phi(0) is treated as 0.
    """

    steps: Tuple[StepPiece, ...] = ()
    analytic: Tuple[AnalyticPiece, ...] = ()

    def __post_init__(self):
        steps = _canonical_steps(self.steps)
        analytic = tuple(sorted(self.analytic, key=lambda p: p.lo))
        pieces = sorted(list(steps) + list(analytic), key=lambda p: p.lo)
        for left, right in zip(pieces, pieces[1:]):
            if left.hi > right.lo:
                raise ValueError(f"Overlapping phi pieces [{left.lo}, {left.hi}) and [{right.lo}, {right.hi})")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "analytic", analytic)

    @classmethod
    def from_steps(cls, triples: Sequence[Tuple]) -> "PhiFunction":
        return cls(tuple(StepPiece(lo, hi, value) for lo, hi, value in triples))

    @property
    def is_step_only(self) -> bool:
        return not self.analytic

    def pieces(self) -> List[Piece]:
        return sorted(list(self.steps) + list(self.analytic), key=lambda p: p.lo)

    def segments(self) -> List[Piece]:
        """Pieces in order covering the real line, gaps as zero steps."""
        out: List[Piece] = []
        cursor: Endpoint = -INF
        for piece in self.pieces():
            if cursor < piece.lo:
                out.append(StepPiece(cursor, piece.lo, 0))
            out.append(piece)
            cursor = piece.hi
        if cursor < INF:
            out.append(StepPiece(cursor, INF, 0))
        return out

    def piece_at(self, s) -> Optional[Piece]:
        for piece in self.pieces():
            if piece.contains(s):
                return piece
        return None

    def value(self, s):
        """Exact Fraction on step pieces, float on analytic pieces."""
        if s == 0:
            return Fraction(0)
        piece = self.piece_at(s)
        if piece is None:
            return Fraction(0)
        if isinstance(piece, StepPiece):
            return piece.value
        return float(piece.value_np(np.array([float(s)]))[0])

    def values_np(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for piece in self.steps:
            mask = (s >= float(piece.lo)) & (s < float(piece.hi))
            out[mask] = float(piece.value)
        for piece in self.analytic:
            mask = (s >= float(piece.lo)) & (s < float(piece.hi))
            if np.any(mask):
                out[mask] = piece.value_np(s[mask])
        out[s == 0] = 0.0
        return out

    def breakpoints(self) -> List[Fraction]:
        return sorted({e for p in self.pieces() for e in (p.lo, p.hi) if not math.isinf(e)})

    def __add__(self, other: "PhiFunction") -> "PhiFunction":
        cuts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        bounds = [-INF] + cuts + [INF]
        steps, analytic = [], []
        for lo, hi in zip(bounds, bounds[1:]):
            point = _representative(lo, hi)
            level = Fraction(0)
            curve = None
            for phi in (self, other):
                piece = phi.piece_at(point)
                if isinstance(piece, StepPiece):
                    level += piece.value
                elif piece is not None:
                    if curve is not None:
                        raise ValueError(f"Two analytic pieces overlap on [{lo}, {hi})")
                    curve = piece
            if curve is not None:
                analytic.append(curve.restrict(lo, hi, -level))
            elif level != 0:
                steps.append(StepPiece(lo, hi, level))
        return PhiFunction(tuple(steps), tuple(analytic))

    def __neg__(self) -> "PhiFunction":
        if not self.is_step_only:
            raise ValueError("Only step functions can be negated")
        return PhiFunction(tuple(StepPiece(p.lo, p.hi, -p.value) for p in self.steps))

    def __sub__(self, other: "PhiFunction") -> "PhiFunction":
        return self + (-other)


@dataclass(frozen=True)
class BellRepresentation:
    """Parameters (a, b, c, phi) of the exponential representation."""

    a: Fraction = Fraction(0)
    b: Union[Fraction, float] = Fraction(0)
    c: Constant = field(default_factory=LogCombination)
    phi: PhiFunction = field(default_factory=PhiFunction)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        if not isinstance(self.b, float):
            object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "c", _as_constant(self.c))
        if self.a < 0:
            raise ValueError(f"Gaussian coefficient a must be non-negative, got {self.a}")


# ---------------------------------------------------------------------------
# Level crossing and tail integrability
# ---------------------------------------------------------------------------

@dataclass
class LevelCrossingReport:
    """
    Per-level sign-change counts of phi - k.

    Attributes:
    -----------
    counts : Dict[int, int]
        Sign changes of phi - k for |k| <= k_max
    sign_condition : bool
        phi >= 0 on (0, inf) and phi <= 0 on (-inf, 0)
    approximate : bool
        True when some analytic piece was only sampled on a grid
    witness : dict, optional
        First violating level with the points where the sign flips
    """

    counts: Dict[int, int]
    sign_condition: bool
    k_max: int
    approximate: bool = False
    zero_crossing_at_origin: bool = True
    witness: Optional[Dict] = None

    @property
    def violations(self) -> List[int]:
        return [k for k, count in sorted(self.counts.items(), key=lambda kv: (abs(kv[0]), kv[0])) if count > 1]

    @property
    def passed(self) -> bool:
        return self.sign_condition and not self.violations and self.zero_crossing_at_origin

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "approximate": self.approximate,
            "sign_condition": self.sign_condition,
            "zero_crossing_at_origin": self.zero_crossing_at_origin,
            "k_max": self.k_max,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "violations": self.violations,
            "witness": self.witness,
        }


def _analytic_grid(piece: AnalyticPiece) -> np.ndarray:
    lo_mag, hi_mag = GRID_RANGE
    if piece.hi <= 0:
        inner, outer, sign = -float(piece.hi), -float(piece.lo), -1.0
    else:
        inner, outer, sign = float(piece.lo), float(piece.hi), 1.0
    inner = max(inner, lo_mag)
    outer = min(outer, hi_mag)
    if outer <= inner:
        return np.array([sign * inner])
    decades = math.log10(outer / inner)
    count = max(1000, int(decades * GRID_POINTS_PER_DECADE))
    grid = sign * np.geomspace(inner, outer, count)
    return np.sort(grid)


def _segment_samples(piece: Piece) -> Tuple[List[Tuple], bool]:
    """(s, value) samples of a segment in increasing s, and an approximation flag."""
    if isinstance(piece, StepPiece):
        return [(_representative(piece.lo, piece.hi), piece.value)], False
    if piece.certified:
        left, right = piece.limits()
        return [(piece.lo, left), (piece.hi, right)], False
    grid = _analytic_grid(piece)
    values = piece.value_np(grid)
    return list(zip(grid.tolist(), values.tolist())), True


def check_level_crossing(phi: PhiFunction, k_max: Optional[int] = None) -> LevelCrossingReport:
    """
    Count the sign changes of phi - k for every integer |k| <= k_max.

    Parameters:
    -----------
    phi : PhiFunction
        Function to check
    k_max : int, optional
        Largest level; defaults to ceil(sup |phi|) over the represented
        pieces, or DEFAULT_UNBOUNDED_KMAX when phi is unbounded

    Returns:
    --------
    LevelCrossingReport
        Counts per level, the sign condition and the first violation

    Notes:
    ------
    Step pieces and monotone closed forms are checked exactly from their
    values and one-sided limits; other analytic pieces are sampled on a
    log grid and the report is flagged approximate.
    """
    samples: List[Tuple] = []
    approximate = False
    sign_condition = True
    for segment in phi.segments():
        segment_samples, approx = _segment_samples(segment)
        approximate = approximate or approx
        samples.extend(segment_samples)
        for _, value in segment_samples:
            if segment.lo >= 0 and value < 0:
                sign_condition = False
            if segment.hi <= 0 and value > 0:
                sign_condition = False
        if segment.lo < 0 < segment.hi and isinstance(segment, StepPiece) and segment.value != 0:
            sign_condition = False

    if k_max is None:
        magnitude = max((abs(v) for _, v in samples), default=0)
        k_max = DEFAULT_UNBOUNDED_KMAX if math.isinf(magnitude) else max(1, math.ceil(magnitude))

    counts: Dict[int, int] = {}
    witness = None
    float_values = np.array([float(v) for _, v in samples]) if approximate else None
    for k in sorted(range(-k_max, k_max + 1), key=lambda k: (abs(k), k)):
        if float_values is None:
            signs = [_sign(value - k) for _, value in samples]
            counts[k] = count_alternations(signs)
        else:
            signs = np.sign(float_values - k).astype(int)
            nonzero = signs[signs != 0]
            counts[k] = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
        if counts[k] > 1 and witness is None:
            flips = []
            previous = 0
            for (point, _), sign in zip(samples, list(signs)):
                if sign and sign != previous:
                    flips.append({"s": str(point) if isinstance(point, Fraction) or math.isinf(point) else float(point), "sign": int(sign)})
                    previous = sign
            witness = {"k": k, "count": counts[k], "points": flips}

    report = LevelCrossingReport(
        counts=counts,
        sign_condition=sign_condition,
        k_max=k_max,
        approximate=approximate,
        zero_crossing_at_origin=sign_condition and counts.get(0, 0) <= 1,
        witness=witness,
    )
    logger.info("level crossing: %s (violations %s)", "pass" if report.passed else "fail", report.violations)
    return report


@dataclass
class TailIntegrabilityReport:
    """Value of the integral of |phi(s)|/|s|^3 over |s| >= 1."""

    finite: bool
    exact: bool
    value: Optional[Fraction] = None
    enclosure: Optional[Tuple[float, float]] = None

    def to_dict(self) -> Dict:
        return {
            "finite": self.finite,
            "exact": self.exact,
            "value": str(self.value) if self.value is not None else None,
            "enclosure": list(self.enclosure) if self.enclosure is not None else None,
        }


def _tail_parts(lo: Endpoint, hi: Endpoint) -> List[Tuple[Endpoint, Endpoint]]:
    parts = []
    if hi > 1:
        parts.append((max(lo, Fraction(1)), hi))
    if lo < -1:
        parts.append((lo, min(hi, Fraction(-1))))
    return parts


def _inverse_square(value: Endpoint) -> Fraction:
    return Fraction(0) if math.isinf(value) else 1 / (Fraction(value) ** 2)


def check_tail_integrability(phi: PhiFunction) -> TailIntegrabilityReport:
    """
    Integral of |phi(s)| / |s|^3 over |s| >= 1.

    Exact for step pieces; analytic tails are integrated by tanh-sinh
    quadrature, and power laws reaching infinity with exponent >= 2 are
    reported divergent.
    """
    exact_part = Fraction(0)
    for piece in phi.steps:
        for a, b in _tail_parts(piece.lo, piece.hi):
            # integral of |v| / |s|^3 over [a, b] on one side of zero
            exact_part += abs(piece.value) / 2 * abs(_inverse_square(a) - _inverse_square(b))

    if phi.is_step_only:
        return TailIntegrabilityReport(True, True, exact_part, (float(exact_part), float(exact_part)))

    numeric, error = mp.mpf(0), mp.mpf(0)
    with mp.workdps(30):
        for piece in phi.analytic:
            parts = _tail_parts(piece.lo, piece.hi)
            if isinstance(piece, PowerLaw) and piece.exponent >= 2 and piece.coefficient > 0:
                if any(math.isinf(a) or math.isinf(b) for a, b in parts):
                    return TailIntegrabilityReport(False, False)
            for a, b in parts:
                value, estimate = mp.quad(
                    lambda s: abs(piece.value_mp(s)) / abs(s) ** 3,
                    [fraction_to_mpf(a), fraction_to_mpf(b)],
                    error=True,
                )
                if not mp.isfinite(value):
                    return TailIntegrabilityReport(False, False)
                numeric += value
                error += estimate
    total = float(exact_part) + float(numeric)
    slack = float(error) + 1e-15 * abs(total)
    return TailIntegrabilityReport(True, False, None, (total - slack, total + slack))


@lru_cache(maxsize=256)
def _tail_is_finite(phi: PhiFunction) -> bool:
    return check_tail_integrability(phi).finite


# ---------------------------------------------------------------------------
# Decomposition phi = phi1 + phi2
# ---------------------------------------------------------------------------

def _clip(segment: Piece, lo: Endpoint, hi: Endpoint) -> Optional[Tuple[Endpoint, Endpoint]]:
    a, b = max(segment.lo, lo), min(segment.hi, hi)
    return (a, b) if a < b else None


def _upper_level_point(segments: List[Piece], k: int) -> Endpoint:
    """s_k = sup{s > 0 : phi(s) < k}; 0 when phi >= k on all of (0, inf)."""
    for segment in reversed(segments):
        span = _clip(segment, Fraction(0), INF)
        if span is None:
            continue
        if isinstance(segment, StepPiece):
            if segment.value < k:
                return span[1]
            continue
        left, right = segment.limits()
        if segment.increasing:
            if right <= k:
                return span[1]
            if left < k:
                return segment.inverse(k)
        elif right < k:
            return span[1]
    return Fraction(0)


def _lower_level_point(segments: List[Piece], k: int) -> Endpoint:
    """s_-k = inf{s < 0 : phi(s) > -k}; 0 when phi <= -k on all of (-inf, 0)."""
    for segment in segments:
        span = _clip(segment, -INF, Fraction(0))
        if span is None:
            continue
        if isinstance(segment, StepPiece):
            if segment.value > -k:
                return span[0]
            continue
        left, right = segment.limits()
        if segment.increasing:
            if left >= -k:
                return span[0]
            if right > -k:
                return segment.inverse(-k)
        elif left > -k:
            return span[0]
    return Fraction(0)


def _level_points(phi: PhiFunction, max_levels: int) -> Tuple[List[Endpoint], List[Endpoint]]:
    segments = phi.segments()
    upper, lower = [], []
    for points, locate in ((upper, _upper_level_point), (lower, _lower_level_point)):
        k = 1
        while True:
            point = locate(segments, k)
            if math.isinf(point):
                break
            if k > max_levels:
                raise ValueError(f"phi crosses more than {max_levels} integer levels; it cannot be decomposed in finite form")
            points.append(point)
            k += 1
    return upper, lower


def decompose_phi(phi: PhiFunction, max_levels: int = MAX_LEVELS) -> Tuple[PhiFunction, PhiFunction]:
    """
    Split phi into a bounded part phi1 and a non-decreasing integer step phi2.

    Parameters:
    -----------
    phi : PhiFunction
        Function satisfying the level crossing condition
    max_levels : int, default=256
        Largest number of integer levels per side

    Returns:
    --------
    Tuple[PhiFunction, PhiFunction]
        (phi1, phi2) with phi = phi1 + phi2, phi1 in [0, 1] on (0, inf) and
        in [-1, 0] on (-inf, 0)

    Notes:
    ------
    phi2 jumps by one at s_k = sup{s : phi(s) < k} for k = 1, 2, ... and
    at s_-k = inf{s : phi(s) > -k} on the negative side, so it vanishes on
    [s_-1, s_1).
    """
    report = check_level_crossing(phi)
    if not report.passed:
        raise LevelCrossingViolated(
            f"phi violates the level crossing condition at k = {report.violations or 'sign'}", report
        )
    upper, lower = _level_points(phi, max_levels)

    steps = []
    for k, point in enumerate(upper, start=1):
        right = upper[k] if k < len(upper) else INF
        if point < right:
            steps.append(StepPiece(point, right, k))
    for k, point in enumerate(lower, start=1):
        left = lower[k] if k < len(lower) else -INF
        if left < point:
            steps.append(StepPiece(left, point, -k))
    phi2 = PhiFunction(tuple(steps))
    phi1 = phi - phi2
    logger.info("decomposed phi: %d upper and %d lower integer levels", len(upper), len(lower))
    return phi1, phi2


# ---------------------------------------------------------------------------
# Kernel integrals
# ---------------------------------------------------------------------------

# kernel name -> (subtract z/s outside (-1, 1), outer form used on the whole line)
_KERNELS = {
    "bell": (True, False),
    "stieltjes": (False, False),
    "polya": (True, True),
}


def _split_at_unit(lo: Endpoint, hi: Endpoint, kernel: str) -> List[Tuple[Endpoint, Endpoint, bool]]:
    """Sub-intervals of [lo, hi) tagged True when outside (-1, 1)."""
    if _KERNELS[kernel][1]:
        return [(lo, hi, True)]
    cuts = [c for c in (Fraction(-1), Fraction(1)) if lo < c < hi]
    bounds = [lo] + cuts + [hi]
    parts = []
    for a, b in zip(bounds, bounds[1:]):
        parts.append((a, b, b <= -1 or a >= 1))
    return parts


def _antiderivative_mp(z, s: Endpoint, outside: bool, with_z: bool):
    if outside and s == INF:
        return mp.mpc(0)
    if outside and s == -INF:
        return mp.mpc(0, mp.pi * mp.sign(mp.im(z)))
    s = fraction_to_mpf(s)
    value = mp.log(z + s)
    if outside:
        value -= mp.log(abs(s))
        if with_z:
            value -= z / s
    return value


def _antiderivative_np(z: np.ndarray, s: Endpoint, outside: bool, with_z: bool) -> np.ndarray:
    if outside and s == INF:
        return np.zeros_like(z)
    if outside and s == -INF:
        return 1j * np.pi * np.sign(z.imag)
    s = float(s)
    value = np.log(z + s)
    if outside:
        value = value - math.log(abs(s))
        if with_z:
            value = value - z / s
    return value


def _kernel_mp(z, s, outside: bool, kernel: str):
    with_z, _ = _KERNELS[kernel]
    if not outside:
        return 1 / (z + s)
    if with_z:
        return z * z / (s * s * (z + s))
    return -z / (s * (z + s))


def _powerlaw_half_line(coefficient, alpha, z, lib):
    """Bell-kernel integral of c s^alpha / Gamma(1 + alpha) over (0, inf)."""
    if alpha == 1:
        return coefficient * (1 + z * lib.log(z))
    gamma = lib.gamma(1 + alpha)
    return coefficient / gamma * (-lib.pi * lib.power(z, alpha) / lib.sin(lib.pi * alpha) + 1 / alpha + z / (1 - alpha))


class _NumpyLib:
    pi = np.pi
    log = staticmethod(np.log)
    sin = staticmethod(np.sin)
    power = staticmethod(lambda z, a: np.power(z.astype(complex), a))
    gamma = staticmethod(special.gamma)


def _check_polya_support(lo: Endpoint, hi: Endpoint, kernel: str):
    if _KERNELS[kernel][1] and lo <= 0 <= hi:
        raise DivergentRepresentation(f"Polya kernel needs phi to vanish near 0, piece [{lo}, {hi})")


def phi_integral_mp(phi: PhiFunction, z, kernel: str = "bell"):
    """
    Integral of K(z, s) phi(s) ds at one complex z with Im z != 0.

    Step pieces use the logarithmic antiderivatives in closed form; full
    half-line power laws use their closed form; other analytic pieces are
    integrated by tanh-sinh quadrature split at -1, 0 and 1.
    """
    with_z, _ = _KERNELS[kernel]
    total = mp.mpc(0)
    for piece in phi.steps:
        _check_polya_support(piece.lo, piece.hi, kernel)
        value = fraction_to_mpf(piece.value)
        for a, b, outside in _split_at_unit(piece.lo, piece.hi, kernel):
            total += value * (
                _antiderivative_mp(z, b, outside, with_z) - _antiderivative_mp(z, a, outside, with_z)
            )
    for piece in phi.analytic:
        _check_polya_support(piece.lo, piece.hi, kernel)
        if kernel == "bell" and isinstance(piece, PowerLaw) and piece.full_half_line:
            c, alpha = fraction_to_mpf(piece.coefficient), fraction_to_mpf(piece.exponent)
            argument = z if piece.lo == 0 else -z
            total += _powerlaw_half_line(c, alpha, argument, mp)
            continue
        total += _analytic_quad_mp(piece, z, kernel)
    return total


def _analytic_quad_mp(piece: AnalyticPiece, z, kernel: str):
    cuts = [c for c in (Fraction(-1), Fraction(0), Fraction(1)) if piece.lo < c < piece.hi]
    bounds = [piece.lo] + cuts + [piece.hi]
    total = mp.mpc(0)
    for a, b in zip(bounds, bounds[1:]):
        outside = _KERNELS[kernel][1] or b <= -1 or a >= 1
        total += mp.quad(
            lambda s: piece.value_mp(s) * _kernel_mp(z, s, outside, kernel),
            _quadrature_points(piece, a, b),
        )
    return total


def _quadrature_points(piece: AnalyticPiece, a: Endpoint, b: Endpoint) -> List:
    """Endpoints of [a, b), with one node per period up to OSCILLATION_SPAN when b or a is infinite."""
    points = [fraction_to_mpf(a), fraction_to_mpf(b)]
    if piece.period is None or not (math.isinf(a) or math.isinf(b)):
        return points
    finite = b if math.isinf(a) else a
    step = mp.mpf(piece.period)
    count = int(OSCILLATION_SPAN / piece.period)
    direction = -1 if math.isinf(a) else 1
    inner = [fraction_to_mpf(finite) + direction * k * step for k in range(1, count + 1)]
    nodes = [points[0]] + (inner[::-1] if direction < 0 else inner) + [points[1]]
    return nodes


def phi_integral_np(phi: PhiFunction, xi: np.ndarray, kernel: str = "bell", dps: int = 20) -> np.ndarray:
    """Vectorised phi_integral at z = i xi for a float array xi with no zeros."""
    with_z, _ = _KERNELS[kernel]
    z = 1j * np.asarray(xi, dtype=float)
    total = np.zeros_like(z)
    for piece in phi.steps:
        _check_polya_support(piece.lo, piece.hi, kernel)
        for a, b, outside in _split_at_unit(piece.lo, piece.hi, kernel):
            total += float(piece.value) * (
                _antiderivative_np(z, b, outside, with_z) - _antiderivative_np(z, a, outside, with_z)
            )
    for piece in phi.analytic:
        if kernel == "bell" and isinstance(piece, PowerLaw) and piece.full_half_line:
            argument = z if piece.lo == 0 else -z
            total += _powerlaw_half_line(float(piece.coefficient), float(piece.exponent), argument, _NumpyLib)
            continue
        with mp.workdps(dps):
            total += np.array([complex(_analytic_quad_mp(piece, mp.mpc(0, x), kernel)) for x in np.asarray(xi)])
    return total


# ---------------------------------------------------------------------------
# Transforms of representations
# ---------------------------------------------------------------------------

def transform_from_representation(rep: BellRepresentation, xi, dps: int = 30) -> complex:
    """
    F(i xi) of a representation (a, b, c, phi).

    Parameters:
    -----------
    rep : BellRepresentation
        Representation parameters
    xi : real
        Non-zero frequency
    dps : int, default=30
        Working precision in decimal digits

    Returns:
    --------
    complex
        exp(-a xi^2 - i b xi + c + integral of K(i xi, s) phi(s) ds)
    """
    if xi == 0:
        raise ValueError("The representation is defined for xi != 0 only")
    if not _tail_is_finite(rep.phi):
        raise DivergentRepresentation("Integral of |phi(s)|/|s|^3 over |s| >= 1 diverges")
    with mp.workdps(dps):
        x = fraction_to_mpf(xi) if isinstance(xi, Fraction) else mp.mpf(xi)
        z = mp.mpc(0, x)
        exponent = (
            -fraction_to_mpf(rep.a) * x * x
            - z * constant_to_mpf(rep.b, dps)
            + constant_to_mpf(rep.c, dps)
            + phi_integral_mp(rep.phi, z, "bell")
        )
        return complex(mp.exp(exponent))


def _decays_exponentially(rep: BellRepresentation) -> bool:
    if rep.a > 0:
        return True
    return any(math.isinf(p.lo) or math.isinf(p.hi) for p in rep.phi.analytic)


def representation_transform(rep: BellRepresentation, name: str = "representation", dps: int = 20) -> FourierTransform:
    """
    FourierTransform of a representation with a vectorised numpy path.

    The value at xi = 0 is the real part of the limit from xi = 1e-9.
    """
    if not _tail_is_finite(rep.phi):
        raise DivergentRepresentation("Integral of |phi(s)|/|s|^3 over |s| >= 1 diverges")
    a, b, c = float(rep.a), float(constant_to_mpf(rep.b)), float(constant_to_mpf(rep.c))

    def np_func(xi):
        xi = np.asarray(xi, dtype=float)
        safe = np.where(xi == 0, 1e-9, xi)
        exponent = -a * safe ** 2 - 1j * b * safe + c + phi_integral_np(rep.phi, safe, "bell", dps)
        values = np.exp(exponent)
        return np.where(xi == 0, values.real + 0j, values)

    def mp_func(xi):
        if xi == 0:
            return mp.mpc(transform_from_representation(rep, 1e-9, mp.dps).real)
        return mp.mpc(transform_from_representation(rep, xi, mp.dps))

    decay = INF
    if not _decays_exponentially(rep):
        segments = rep.phi.segments()
        decay = float(segments[-1].value - segments[0].value) if rep.phi.is_step_only else 0.0
    return FourierTransform(name=name, np_func=np_func, mp_func=mp_func, decay=decay,
                            exponential_decay=_decays_exponentially(rep))


def calibrate_constants(phi: PhiFunction, target: FourierTransform, a=Fraction(0), xi0: float = 0.5) -> BellRepresentation:
    """
    Representation with the given phi whose b and c match target at xi0.

    One complex equation fixes both real constants; b and c are floats.
    """
    with mp.workdps(30):
        z = mp.mpc(0, xi0)
        base = -fraction_to_mpf(Fraction(a)) * xi0 ** 2 + phi_integral_mp(phi, z, "bell")
        difference = mp.log(target.mp(xi0)) - base
    return BellRepresentation(a=a, b=float(-mp.im(difference) / xi0), c=float(mp.re(difference)), phi=phi)


# ---------------------------------------------------------------------------
# Polya frequency functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyaParams:
    """
    Transform e^(a z^2 - b z) prod e^(z/z_n) / (1 + z/z_n).

    zeros holds finitely many non-zero z_n; geometric_scale m appends the
    infinite family z_n = m 2^n, n >= 1.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    zeros: Tuple[Fraction, ...] = ()
    geometric_scale: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b) if not isinstance(self.b, float) else self.b)
        object.__setattr__(self, "zeros", tuple(sorted(Fraction(z) for z in self.zeros)))
        if self.geometric_scale is not None:
            object.__setattr__(self, "geometric_scale", Fraction(self.geometric_scale))
            if self.geometric_scale <= 0:
                raise ValueError(f"Geometric scale must be positive, got {self.geometric_scale}")
        if self.a < 0:
            raise ValueError(f"Polya coefficient a must be non-negative, got {self.a}")
        if any(z == 0 for z in self.zeros):
            raise ValueError("Polya zeros must be non-zero")

    @classmethod
    def geometric(cls, m) -> "PolyaParams":
        """The family g_m with transform prod 1/(1 + z/(m 2^n)); b = sum 1/z_n = 1/m."""
        m = Fraction(m)
        return cls(a=Fraction(0), b=1 / m, geometric_scale=m)


def geometric_cutoff(scale, xi_max: float, tol: float) -> int:
    """
    Smallest N whose tail sum over n > N of |w_n - log(1 + w_n)|, w_n = i xi/(m 2^n),
    is certified below tol via |w - log(1 + w)| <= |w|^2 for |w| <= 1/2.
    """
    m = float(scale)
    n = 0
    while not (xi_max / (m * 2 ** n) <= 1 and xi_max ** 2 / (3 * m * m * 4 ** n) <= tol):
        n += 1
    return n


def polya_transform(params: PolyaParams, xi, tol: float = 1e-12, dps: int = 30) -> complex:
    """Value of the Polya frequency transform at z = i xi."""
    with mp.workdps(dps):
        x = fraction_to_mpf(xi) if isinstance(xi, Fraction) else mp.mpf(xi)
        z = mp.mpc(0, x)
        exponent = fraction_to_mpf(params.a) * z * z - constant_to_mpf(params.b, dps) * z
        for zero in params.zeros:
            w = z / fraction_to_mpf(zero)
            exponent += w - mp.log(1 + w)
        if params.geometric_scale is not None:
            m = fraction_to_mpf(params.geometric_scale)
            for n in range(1, geometric_cutoff(params.geometric_scale, abs(float(x)), tol) + 1):
                w = z / (m * 2 ** n)
                exponent += w - mp.log(1 + w)
        return complex(mp.exp(exponent))


def polya_fourier(params: PolyaParams, tol: float = 1e-12, xi_cap: float = 1e4) -> FourierTransform:
    """FourierTransform of a Polya frequency function; the family is truncated for |xi| <= xi_cap."""
    zeros = [float(z) for z in params.zeros]
    terms = list(zeros)
    if params.geometric_scale is not None:
        m = float(params.geometric_scale)
        terms += [m * 2 ** n for n in range(1, geometric_cutoff(params.geometric_scale, xi_cap, tol) + 1)]
    a, b = float(params.a), float(params.b)

    def np_func(xi):
        z = 1j * np.asarray(xi, dtype=float)
        exponent = a * z * z - b * z
        for zero in terms:
            w = z / zero
            exponent = exponent + w - np.log(1 + w)
        return np.exp(exponent)

    return FourierTransform(
        name="polya",
        np_func=np_func,
        mp_func=lambda xi: mp.mpc(polya_transform(params, xi, tol, mp.dps)),
        decay=INF if params.a > 0 or params.geometric_scale is not None else float(len(zeros)),
        exponential_decay=params.a > 0,
    )


def polya_phi(params: PolyaParams, n_terms: int = 40) -> PhiFunction:
    """Integer step phi of a Polya family; the geometric family is truncated at n_terms."""
    zeros = list(params.zeros)
    if params.geometric_scale is not None:
        zeros += [params.geometric_scale * 2 ** n for n in range(1, n_terms + 1)]
    phi = PhiFunction()
    for zero in zeros:
        piece = StepPiece(zero, INF, 1) if zero > 0 else StepPiece(-INF, zero, -1)
        phi = phi + PhiFunction((piece,))
    return phi


def polya_phi_moment(params: PolyaParams) -> Fraction:
    """Exact integral of phi(s)/s^3 for a Polya family, (1/2) sum 1/z_n^2."""
    total = sum((1 / (z * z) for z in params.zeros), Fraction(0))
    if params.geometric_scale is not None:
        total += 1 / (3 * params.geometric_scale ** 2)
    return total / 2


# ---------------------------------------------------------------------------
# Splitting a representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StieltjesSide:
    """exp(c_tilde + integral of (1/(z+s) - 1_{|s|>=1}/s) phi1(s) ds)."""

    c_tilde: Constant
    phi1: PhiFunction


@dataclass(frozen=True)
class PolyaSide:
    """Polya factor of a split representation."""

    a: Fraction
    b_tilde: Union[Fraction, float]
    phi2: PhiFunction
    params: PolyaParams


def _unit_window_integrals(phi2: PhiFunction) -> Tuple[Fraction, LogCombination]:
    """Integrals of phi2/s^2 and phi2/s over (-1, 1)."""
    inverse_square = Fraction(0)
    logarithmic = LogCombination()
    for piece in phi2.steps:
        a, b = max(piece.lo, Fraction(-1)), min(piece.hi, Fraction(1))
        if not a < b:
            continue
        if a <= 0 <= b:
            raise DivergentRepresentation(f"phi2 does not vanish near 0: piece [{piece.lo}, {piece.hi})")
        inverse_square += piece.value * (1 / a - 1 / b)
        logarithmic = logarithmic + LogCombination(0, ((piece.value, b / a),))
    return inverse_square, logarithmic


def _outer_inverse_square(phi1: PhiFunction) -> Tuple[Fraction, float]:
    """Integral of phi1/s^2 over |s| >= 1 as (exact step part, quadrature part)."""
    exact = Fraction(0)
    for piece in phi1.steps:
        for a, b in _tail_parts(piece.lo, piece.hi):
            inv_a = Fraction(0) if math.isinf(a) else 1 / Fraction(a)
            inv_b = Fraction(0) if math.isinf(b) else 1 / Fraction(b)
            exact += piece.value * (inv_a - inv_b)
    numeric = 0.0
    with mp.workdps(30):
        for piece in phi1.analytic:
            for a, b in _tail_parts(piece.lo, piece.hi):
                numeric += float(mp.quad(lambda s: piece.value_mp(s) / (s * s),
                                         [fraction_to_mpf(a), fraction_to_mpf(b)]))
    return exact, numeric


def split_representation(rep: BellRepresentation) -> Tuple[StieltjesSide, PolyaSide]:
    """
    Factor a representation into a Stieltjes side and a Polya side.

    b_tilde = b - integral_{|s|>=1} phi1/s^2 + integral_{(-1,1)} phi2/s^2
    c_tilde = c + integral_{(-1,1)} phi2/s

    The constants are exact for step phi (c_tilde may carry logarithms);
    analytic phi1 tails make b_tilde a float.
    """
    phi1, phi2 = decompose_phi(rep.phi)
    inner_square, inner_log = _unit_window_integrals(phi2)
    outer_exact, outer_numeric = _outer_inverse_square(phi1)

    if isinstance(rep.b, float) or outer_numeric:
        b_tilde: Union[Fraction, float] = float(rep.b) - float(outer_exact) - outer_numeric + float(inner_square)
    else:
        b_tilde = rep.b - outer_exact + inner_square
    if isinstance(rep.c, float):
        c_tilde: Constant = rep.c + float(inner_log)
    else:
        c_tilde = rep.c + inner_log

    positive = [p for p in phi2.steps if p.lo > 0]
    negative = [p for p in phi2.steps if p.hi < 0]
    # each unit jump of phi2 is one zero of the Polya factor
    zeros = []
    previous = Fraction(0)
    for piece in positive:
        zeros += [piece.lo] * int(piece.value - previous)
        previous = piece.value
    previous = Fraction(0)
    for piece in reversed(negative):
        zeros += [piece.hi] * int(previous - piece.value)
        previous = piece.value

    params = PolyaParams(a=rep.a, b=b_tilde, zeros=tuple(zeros))
    return StieltjesSide(c_tilde, phi1), PolyaSide(rep.a, b_tilde, phi2, params)


def stieltjes_side_transform(side: StieltjesSide, xi, dps: int = 30) -> complex:
    """exp(c_tilde + integral of (1/(z+s) - 1_{|s|>=1}/s) phi1(s) ds) at z = i xi."""
    if xi == 0:
        raise ValueError("The Stieltjes side is evaluated for xi != 0 only")
    with mp.workdps(dps):
        x = fraction_to_mpf(xi) if isinstance(xi, Fraction) else mp.mpf(xi)
        z = mp.mpc(0, x)
        return complex(mp.exp(constant_to_mpf(side.c_tilde, dps) + phi_integral_mp(side.phi1, z, "stieltjes")))


# ---------------------------------------------------------------------------
# Stieltjes functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StieltjesData:
    """F(z) = m + sum mass/(z + s) over plus atoms - sum mass/(z - u) over minus atoms."""

    m: Fraction = Fraction(0)
    plus_atoms: Tuple[Tuple[Fraction, Fraction], ...] = ()
    minus_atoms: Tuple[Tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "m", Fraction(self.m))
        for name in ("plus_atoms", "minus_atoms"):
            atoms = tuple(sorted((Fraction(s), Fraction(w)) for s, w in getattr(self, name)))
            for location, mass in atoms:
                if location <= 0 or mass <= 0:
                    raise ValueError(f"Stieltjes atoms need positive location and mass, got ({location}, {mass})")
            object.__setattr__(self, name, atoms)
        if self.m < 0:
            raise ValueError(f"Atom at zero must be non-negative, got {self.m}")


def stieltjes_eval(data: StieltjesData, z):
    """
    Evaluate a Stieltjes function.

    Sympy numbers (for example 1 + 2*sympy.I) and Fractions are evaluated
    exactly and the result is returned as a sympy expression a + b*I;
    Python complex numbers use floating arithmetic.
    """
    if isinstance(z, (sympy.Basic, Fraction, int)):
        point = to_sympy_rational(z) if isinstance(z, (Fraction, int)) else sympy.nsimplify(z)
        total = to_sympy_rational(data.m)
        for location, mass in data.plus_atoms:
            denominator = point + to_sympy_rational(location)
            if sympy.simplify(denominator) == 0:
                raise PoleHit(f"z = {z} is the pole -{location}")
            total += to_sympy_rational(mass) / denominator
        for location, mass in data.minus_atoms:
            denominator = point - to_sympy_rational(location)
            if sympy.simplify(denominator) == 0:
                raise PoleHit(f"z = {z} is the pole {location}")
            total -= to_sympy_rational(mass) / denominator
        return sympy.expand_complex(sympy.radsimp(total))

    z = complex(z)
    total = complex(float(data.m))
    for location, mass in data.plus_atoms:
        if z == -float(location):
            raise PoleHit(f"z = {z} is the pole -{location}")
        total += float(mass) / (z + float(location))
    for location, mass in data.minus_atoms:
        if z == float(location):
            raise PoleHit(f"z = {z} is the pole {location}")
        total -= float(mass) / (z - float(location))
    return total


def stieltjes_from_partial_fractions(transform, z: sympy.Symbol) -> StieltjesData:
    """
    StieltjesData of a rational function with simple real poles.

    c/(z + p) with p > 0 is a plus atom at p; c/(z - u) with u > 0 is a
    minus atom of mass -c; the constant term is the atom at zero.
    """
    expanded = sympy.apart(sympy.together(transform), z)
    m = Fraction(0)
    plus, minus = [], []
    for part in sympy.Add.make_args(expanded):
        if part.is_number:
            m += from_sympy_rational(part)
            continue
        numerator, denominator = sympy.fraction(sympy.factor(part))
        poly = sympy.Poly(denominator, z)
        if not numerator.is_number or poly.degree() != 1:
            raise ValueError(f"Partial fraction {part} is not a simple pole")
        lead, constant = poly.all_coeffs()
        pole_shift = from_sympy_rational(constant / lead)
        mass = from_sympy_rational(numerator / lead)
        if pole_shift > 0:
            plus.append((pole_shift, mass))
        else:
            minus.append((-pole_shift, -mass))
    return StieltjesData(m, tuple(plus), tuple(minus))


def nevanlinna_pick_holds(data: StieltjesData, samples: Sequence[complex]) -> bool:
    """Im(z F(z)) > 0 at every sample with Im z > 0."""
    for z in samples:
        if complex(z).imag <= 0:
            raise ValueError(f"Sample {z} is not in the upper half-plane")
        if (complex(z) * stieltjes_eval(data, complex(z))).imag <= 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Products of linear factors
# ---------------------------------------------------------------------------

def _side_events(poles: Sequence[Tuple], zeros: Sequence[Tuple], positive: bool) -> List[Tuple[Fraction, Fraction]]:
    events: Dict[Fraction, Fraction] = {}
    for sign, items in ((1, poles), (-1, zeros)):
        for location, multiplicity in items:
            location, multiplicity = Fraction(location), Fraction(multiplicity)
            if location == 0:
                raise ValueError("Factor locations must be non-zero")
            if multiplicity <= 0:
                raise ValueError(f"Multiplicity must be positive, got {multiplicity}")
            if (location > 0) == positive:
                events[location] = events.get(location, Fraction(0)) + sign * multiplicity
    return sorted(events.items(), key=lambda e: abs(e[0]))


def phi_from_interlacing_rational(poles: Sequence[Tuple], zeros: Sequence[Tuple] = ()) -> PhiFunction:
    """
    Step phi of prod (1 + z/l)^-m over poles times prod (1 + z/l)^m over zeros.

    On s > 0, phi(s) sums pole multiplicities minus zero multiplicities at
    locations <= s; on s < 0 the mirrored sum enters with a minus sign.
    Multiplicities may be rational.
    """
    steps = []
    for positive in (True, False):
        events = _side_events(poles, zeros, positive)
        partial = Fraction(0)
        for index, (location, weight) in enumerate(events):
            partial += weight
            if partial < 0:
                raise NotExpRepresentable(
                    f"Partial sum of pole minus zero multiplicities is {partial} at {location}"
                )
            following = events[index + 1][0] if index + 1 < len(events) else (INF if positive else -INF)
            if positive:
                steps.append(StepPiece(location, following, partial))
            else:
                steps.append(StepPiece(following, location, -partial))
    return PhiFunction(tuple(steps))


def representation_from_interlacing_rational(poles: Sequence[Tuple], zeros: Sequence[Tuple] = (),
                                             shift=Fraction(0)) -> BellRepresentation:
    """
    Complete representation of e^(-shift z) times a product of linear factors.

    A factor at l with signed multiplicity m (negative for zeros) adds m/l
    to b when |l| >= 1, and sign(l) m to b together with m ln|l| to c when
    |l| < 1.
    """
    phi = phi_from_interlacing_rational(poles, zeros)
    b = Fraction(shift)
    c = LogCombination()
    factors = [(Fraction(l), Fraction(m)) for l, m in poles] + [(Fraction(l), -Fraction(m)) for l, m in zeros]
    for location, weight in factors:
        if abs(location) >= 1:
            b += weight / location
        else:
            b += weight if location > 0 else -weight
            c = c + LogCombination(0, ((weight, abs(location)),))
    return BellRepresentation(a=Fraction(0), b=b, c=c, phi=phi)


# ---------------------------------------------------------------------------
# Levy density duality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpOverX:
    """nu(x) = |x|^-1 sum w e^(-lambda |x|) on one side (side = +1 or -1)."""

    weights: Tuple[Tuple[Fraction, Fraction], ...]
    side: int = 1

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple((Fraction(w), Fraction(r)) for w, r in self.weights))
        if self.side not in (1, -1):
            raise ValueError(f"side must be +1 or -1, got {self.side}")
        for weight, rate in self.weights:
            if weight < 0 or rate < 0:
                raise ValueError(f"Weights and rates must be non-negative, got ({weight}, {rate})")

    def density(self, x) -> float:
        y = float(x) * self.side
        if y <= 0:
            return 0.0
        return sum(float(w) * math.exp(-float(r) * y) for w, r in self.weights) / y

    def phi(self) -> PhiFunction:
        phi = PhiFunction()
        for weight, rate in self.weights:
            if not weight:
                continue
            piece = StepPiece(rate, INF, weight) if self.side == 1 else StepPiece(-INF, -rate, -weight)
            phi = phi + PhiFunction((piece,))
        return phi


@dataclass(frozen=True)
class StablePower:
    """nu(x) = c_plus x^(-1-alpha) for x > 0 and c_minus |x|^(-1-alpha) for x < 0."""

    c_plus: Fraction
    c_minus: Fraction
    alpha: Fraction

    def __post_init__(self):
        for name in ("c_plus", "c_minus", "alpha"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.c_plus < 0 or self.c_minus < 0:
            raise ValueError("Stable coefficients must be non-negative")
        if not 0 < self.alpha < 2:
            raise ValueError(f"Stable index must lie in (0, 2), got {self.alpha}")

    def density(self, x) -> float:
        x = float(x)
        coefficient = float(self.c_plus if x > 0 else self.c_minus)
        return coefficient * abs(x) ** (-1 - float(self.alpha))

    def phi(self) -> PhiFunction:
        pieces = []
        if self.c_plus:
            pieces.append(PowerLaw(Fraction(0), INF, self.c_plus, self.alpha))
        if self.c_minus:
            pieces.append(PowerLaw(-INF, Fraction(0), self.c_minus, self.alpha))
        return PhiFunction((), tuple(pieces))


LevyDensityForm = Union[ExpOverX, StablePower]


def phi_from_nu(form: LevyDensityForm) -> PhiFunction:
    """phi whose per-side Laplace transforms give the tagged Levy density."""
    return form.phi()


def levy_density_exp_form(phi: PhiFunction, side: int = 1) -> ExpPolySum:
    """
    |x| nu(x) on |x| > 0 for one side of a step phi, as an exact ExpPolySum in y = |x|.

    A value-v piece [u, w) on s > 0 contributes v (e^(-u y) - e^(-w y)); on
    s < 0 it contributes -v (e^(w y) - e^(u y)).
    """
    terms = []
    for piece in phi.steps:
        if side == 1 and piece.hi > 0:
            u = max(piece.lo, Fraction(0))
            terms.append((piece.value, 0, -u))
            if not math.isinf(piece.hi):
                terms.append((-piece.value, 0, -piece.hi))
        elif side == -1 and piece.lo < 0:
            w = min(piece.hi, Fraction(0))
            terms.append((-piece.value, 0, w))
            if not math.isinf(piece.lo):
                terms.append((piece.value, 0, piece.lo))
    for piece in phi.analytic:
        if (side == 1 and piece.hi > 0) or (side == -1 and piece.lo < 0):
            raise ValueError(f"{piece.kind} piece has no exponential-sum Levy density")
    merged: Dict[Fraction, Fraction] = {}
    for coefficient, power, rate in terms:
        merged[rate] = merged.get(rate, Fraction(0)) + coefficient
    return ExpPolySum.on_half_line([(c, 0, r) for r, c in sorted(merged.items()) if c != 0])


def nu_from_phi(phi: PhiFunction, x) -> float:
    """
    Levy density at x != 0 as the Laplace transform of phi on the matching side.

    Steps contribute v (e^(-u x) - e^(-w x)) / x; full half-line power laws
    give c x^(-1-alpha); other analytic pieces are integrated numerically.
    """
    if x == 0:
        raise ValueError("The Levy density is evaluated at x != 0 only")
    side = 1 if x > 0 else -1
    y = abs(x)
    with mp.workdps(30):
        y_mp = fraction_to_mpf(y) if isinstance(y, Fraction) else mp.mpf(y)
        total = levy_density_exp_form(PhiFunction(phi.steps), side).to_mpf(y_mp) / y_mp
        for piece in phi.analytic:
            if side == 1 and piece.hi <= 0 or side == -1 and piece.lo >= 0:
                continue
            if isinstance(piece, PowerLaw) and piece.full_half_line:
                total += fraction_to_mpf(piece.coefficient) * y_mp ** (-1 - fraction_to_mpf(piece.exponent))
                continue
            if side == 1:
                value = mp.quad(lambda s: piece.value_mp(s) * mp.exp(-s * y_mp),
                                [fraction_to_mpf(max(piece.lo, Fraction(0))), fraction_to_mpf(piece.hi)])
            else:
                value = mp.quad(lambda s: -piece.value_mp(-s) * mp.exp(-s * y_mp),
                                [fraction_to_mpf(-min(piece.hi, Fraction(0))), fraction_to_mpf(-piece.lo)])
            if not mp.isfinite(value):
                raise DivergentLaplace(f"Laplace integral of the {piece.kind} piece diverges at x = {x}")
            total += value
        return float(total)


# ---------------------------------------------------------------------------
# Boundary behaviour and improper integrals
# ---------------------------------------------------------------------------

@dataclass
class BoundaryConditionReport:
    """Numeric evidence for integrability of Re F near 0 and Im F(i xi) -> 0."""

    re_integral: float
    re_integral_inner: float
    im_samples: Dict[float, float]
    satisfied: bool
    label: str = "numeric evidence"

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "satisfied": self.satisfied,
            "re_integral": self.re_integral,
            "re_integral_inner": self.re_integral_inner,
            "im_samples": {f"{k:.0e}": v for k, v in self.im_samples.items()},
        }


def check_boundary_conditions(transform: FourierTransform, growth_limit: float = 1e3) -> BoundaryConditionReport:
    """
    Integral of Re F(i xi) over (-1, 1) and the limit of Im F(i xi) at 0.

    The integral is taken over 1e-6 < |xi| < 1 and compared with the one
    over 1e-4 < |xi| < 1; the limit is sampled at xi in {1e-2, 1e-4, 1e-6}.
    Verdicts are numeric evidence, never certificates.
    """
    grid = np.geomspace(1e-6, 1.0, 4001)
    values = transform(np.concatenate([-grid[::-1], grid]))
    real = values.real
    full = float(trapezoid(real[len(grid):], grid) + trapezoid(real[:len(grid)][::-1], grid))
    inner_mask = grid >= 1e-4
    inner = float(trapezoid(real[len(grid):][inner_mask], grid[inner_mask])
                  + trapezoid(real[:len(grid)][::-1][inner_mask], grid[inner_mask]))
    samples = {t: float(transform(np.array([t]))[0].imag) for t in (1e-2, 1e-4, 1e-6)}
    converging = abs(full - inner) <= max(1e-3, 1e-2 * abs(full)) and abs(full) < growth_limit
    vanishing = abs(samples[1e-6]) <= max(1e-3, abs(samples[1e-2]))
    return BoundaryConditionReport(full, inner, samples, converging and vanishing)


def truncated_laplace(f: Callable, xi, upper, dps: int = 30) -> complex:
    """Integral of e^(-i xi x) f(x) over (0, upper), the truncation of an improper integral."""
    with mp.workdps(dps):
        x = mp.mpf(xi)
        value = mp.quad(lambda t: f(t) * mp.expj(-x * t), [0, mp.mpf(upper)])
        return complex(value)
