"""
Transforms Module

Fourier-side callables F(i xi) = integral of e^(-i xi x) f(x) dx carrying a
vectorised numpy evaluation (for grids) and an mpmath evaluation (for
adaptive high-precision quadrature), plus the closed-form transforms used by
the example catalog.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp
from scipy import special

from .exact_core import fraction_to_mpf


@dataclass
class FourierTransform:
    """
    Transform of a real function on the imaginary axis, xi -> F(i xi).

    Attributes:
    -----------
    name : str
        Label used in reports
    np_func : Callable
        Vectorised evaluation on a float array of xi values
    mp_func : Callable
        Evaluation at one mpmath real at the current working precision
    decay : float
        Polynomial decay order d with |F| = O(|xi|^-d); inf when F decays
        faster than every power
    exponential_decay : bool
        True when |F| <= C e^(-eps |xi|), enough for undamped inversion
    value_at_zero : complex, optional
        Limit F(0+) when the formula is singular at xi = 0
    """

    name: str
    np_func: Callable[[np.ndarray], np.ndarray]
    mp_func: Callable
    decay: float = math.inf
    exponential_decay: bool = False
    value_at_zero: Optional[complex] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, xi) -> np.ndarray:
        return self.np_func(np.asarray(xi, dtype=float))

    def mp(self, xi):
        return self.mp_func(mp.mpf(xi))

    def at_zero(self) -> complex:
        if self.value_at_zero is not None:
            return complex(self.value_at_zero)
        return complex(self.np_func(np.array([0.0]))[0])

    def times(self, other: "FourierTransform", name: Optional[str] = None) -> "FourierTransform":
        """Transform of the convolution of the two underlying functions."""
        zero = None
        if self.value_at_zero is not None or other.value_at_zero is not None:
            zero = self.at_zero() * other.at_zero()
        return FourierTransform(
            name=name or f"{self.name}*{other.name}",
            np_func=lambda xi: self.np_func(xi) * other.np_func(xi),
            mp_func=lambda xi: self.mp_func(xi) * other.mp_func(xi),
            decay=self.decay + other.decay,
            exponential_decay=self.exponential_decay or other.exponential_decay,
            value_at_zero=zero,
        )


def gaussian_transform(a=Fraction(1)) -> FourierTransform:
    """e^(-a xi^2), the transform of G_a."""
    a_float = float(a)
    return FourierTransform(
        name=f"gaussian(a={a})",
        np_func=lambda xi: np.exp(-a_float * xi ** 2).astype(complex),
        mp_func=lambda xi: mp.mpc(mp.exp(-fraction_to_mpf(a) * xi ** 2)),
        exponential_decay=True,
    )


def cauchy_transform(scale=Fraction(1)) -> FourierTransform:
    """e^(-scale |xi|), the transform of the Cauchy density."""
    s_float = float(scale)
    return FourierTransform(
        name=f"cauchy(scale={scale})",
        np_func=lambda xi: np.exp(-s_float * np.abs(xi)).astype(complex),
        mp_func=lambda xi: mp.mpc(mp.exp(-fraction_to_mpf(scale) * abs(xi))),
        exponential_decay=True,
    )


def rational_transform(poles: Sequence[Tuple], zeros: Sequence[Tuple] = (), shift=Fraction(0)) -> FourierTransform:
    """
    e^(-shift z) prod (1 + z/l)^(-m) over poles times prod (1 + z/l)^m over zeros.

    Multiplicities may be rational; powers use the principal branch, which
    is continuous on z = i xi because Re(1 + z/l) = 1.
    """
    factors = [(Fraction(loc), Fraction(mult)) for loc, mult in poles]
    factors += [(Fraction(loc), -Fraction(mult)) for loc, mult in zeros]
    shift_float = float(shift)
    decay = float(sum(m for _, m in factors))

    def np_func(xi):
        z = 1j * xi
        log_value = -shift_float * z
        for loc, mult in factors:
            log_value = log_value - float(mult) * np.log(1 + z / float(loc))
        return np.exp(log_value)

    def mp_func(xi):
        z = mp.mpc(0, xi)
        log_value = -fraction_to_mpf(shift) * z
        for loc, mult in factors:
            log_value -= fraction_to_mpf(mult) * mp.log(1 + z / fraction_to_mpf(loc))
        return mp.exp(log_value)

    return FourierTransform(
        name="rational",
        np_func=np_func,
        mp_func=mp_func,
        decay=decay,
        meta={"poles": tuple(poles), "zeros": tuple(zeros), "shift": shift},
    )


def two_pole_transform(p=Fraction(1), q=Fraction(2)) -> FourierTransform:
    """(q e^(-p|xi|) - p e^(-q|xi|)) / (q - p), the product of two Cauchy-type factors."""
    p, q = Fraction(p), Fraction(q)
    if not 0 < p < q:
        raise ValueError(f"Two-pole transform needs 0 < p < q, got p={p}, q={q}")
    pf, qf = float(p), float(q)

    def np_func(xi):
        a = np.abs(xi)
        return ((qf * np.exp(-pf * a) - pf * np.exp(-qf * a)) / (qf - pf)).astype(complex)

    def mp_func(xi):
        a = abs(xi)
        pm, qm = fraction_to_mpf(p), fraction_to_mpf(q)
        return mp.mpc((qm * mp.exp(-pm * a) - pm * mp.exp(-qm * a)) / (qm - pm))

    return FourierTransform(name=f"two_pole(p={p}, q={q})", np_func=np_func, mp_func=mp_func,
                            exponential_decay=True)


def bessel_normalisation(p) -> float:
    """c_p with c_p |xi|^nu K_nu(|xi|) -> integral of (1+x^2)^-p as xi -> 0."""
    p = float(p)
    return math.sqrt(math.pi) * 2 ** (1.5 - p) / math.gamma(p)


def bessel_transform(p=Fraction(1)) -> FourierTransform:
    """
    Transform of (1 + x^2)^-p, c_p |xi|^nu K_nu(|xi|) with nu = p - 1/2.
    """
    p_float = float(p)
    if p_float <= 0.5:
        raise ValueError(f"(1+x^2)^-p is integrable only for p > 1/2, got {p}")
    nu = p_float - 0.5
    c_p = bessel_normalisation(p)
    total_mass = math.sqrt(math.pi) * math.gamma(p_float - 0.5) / math.gamma(p_float)

    def np_func(xi):
        a = np.abs(xi)
        out = np.full(a.shape, total_mass, dtype=complex)
        nonzero = a > 0
        out[nonzero] = c_p * a[nonzero] ** nu * special.kv(nu, a[nonzero])
        return out

    def mp_func(xi):
        a = abs(xi)
        if a == 0:
            return mp.mpc(total_mass)
        nu_mp = mp.mpf(p_float) - mp.mpf(1) / 2
        c_mp = mp.sqrt(mp.pi) * mp.power(2, mp.mpf(3) / 2 - mp.mpf(p_float)) / mp.gamma(mp.mpf(p_float))
        return mp.mpc(c_mp * a ** nu_mp * mp.besselk(nu_mp, a))

    return FourierTransform(name=f"bessel(p={p})", np_func=np_func, mp_func=mp_func,
                            exponential_decay=True, value_at_zero=complex(total_mass))


def inverse_sqrt_transform() -> FourierTransform:
    """
    (1/2) z^(-1/2) at z = i xi, the transform of x^(-1/2) / (2 sqrt(pi)) on (0, inf).

    The function is not integrable at infinity; only damped derivatives of
    order n >= 1 are meaningful.
    """
    def np_func(xi):
        z = 1j * xi
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 0.5 * np.power(z.astype(complex), -0.5)
        return np.where(xi == 0, 0.0, out)

    def mp_func(xi):
        if xi == 0:
            return mp.mpc(0)
        return mp.power(mp.mpc(0, xi), -mp.mpf(1) / 2) / 2

    return FourierTransform(name="inverse_sqrt", np_func=np_func, mp_func=mp_func,
                            decay=0.5, value_at_zero=0j)
