"""
Errors Module

Exception hierarchy shared by the exact, representation and numeric layers.
Every error derives from BellShapeError and from the closest builtin so that
callers catching ValueError / ArithmeticError keep working.
"""


class BellShapeError(Exception):
    """Base class for all errors raised by the toolkit."""


class InputFormatError(BellShapeError, ValueError):
    """A representation or function document could not be parsed."""


class NonRepresentablePoint(BellShapeError, ValueError):
    """x^beta is not rational at the requested evaluation point."""


class PrecisionExhausted(BellShapeError, ArithmeticError):
    """Enclosure still straddles zero at the precision ceiling."""


class PoleOnRealLine(BellShapeError, ValueError):
    """The denominator of a rational function vanishes on the real line."""


class LevelCrossingViolated(BellShapeError, ValueError):
    """phi - k changes sign more than once for some integer k."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DivergentRepresentation(BellShapeError, ValueError):
    """The tail integral of |phi(s)|/|s|^3 diverges."""


class PoleHit(BellShapeError, ZeroDivisionError):
    """A Stieltjes function was evaluated at one of its poles."""


class NotExpRepresentable(BellShapeError, ValueError):
    """Interlacing partial sums of poles minus zeros went negative."""


class DivergentLaplace(BellShapeError, ValueError):
    """The Laplace integral defining the Levy density does not converge."""


class ToleranceNotMet(BellShapeError, ArithmeticError):
    """Quadrature error estimate exceeds the requested tolerance."""


class NonIntegrable(BellShapeError, ValueError):
    """The damped transform is not absolutely integrable."""


class UnsupportedFractionalPower(BellShapeError, ValueError):
    """Closed-form heat convolution needs non-negative integer powers."""


class Unstable(BellShapeError, RuntimeError):
    """Sign-change counts did not stabilise under grid refinement."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InvalidIndex(BellShapeError, ValueError):
    """Stability index outside the open interval (0, 2)."""


class UnknownCase(BellShapeError, KeyError):
    """No example case is registered under the requested id."""
