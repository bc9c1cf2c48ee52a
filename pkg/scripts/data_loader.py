"""
Data Loader Module

This module reads and writes the JSON documents consumed by the command
line and the demonstration pipeline: representations (a, b, c, phi) with an
optional closed-form transform, and exact functions (rational functions or
exponential polynomials) for sign-change certificates.

Rationals cross the file boundary as "p/q" strings (plain integers are
accepted too); infinite endpoints are written "inf" / "-inf".
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import sympy

from .errors import InputFormatError
from .exact_core import X, ExpPolyPiece, ExpPolySum, ExpPolyTerm, LogCombination, RationalFunctionExact
from .numeric import stable_fourier, stable_representation
from .representation import (
    ANALYTIC_KINDS,
    BellRepresentation,
    PhiFunction,
    PolyaParams,
    StepPiece,
    as_endpoint,
    polya_fourier,
    polya_phi,
    representation_from_interlacing_rational,
    representation_transform,
)
from .transforms import (
    FourierTransform,
    bessel_transform,
    cauchy_transform,
    gaussian_transform,
    rational_transform,
    two_pole_transform,
)

logger = logging.getLogger(__name__)

REPRESENTATION_KINDS = ("representation", "rational", "stable", "polya")
FUNCTION_KINDS = ("rational", "exp_poly")
CLOSED_FORMS = ("gaussian", "cauchy", "rational", "two_pole", "bessel")


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

def parse_rational(value: Any, name: str = "value") -> Fraction:
    """
    Parse a JSON scalar into an exact rational.

    Parameters:
    -----------
    value : int or str
        Integer, or string "p/q" / "p" / a finite decimal such as "0.25"
    name : str
        Field name used in error messages

    Returns:
    --------
    Fraction
        The exact value

    Raises:
    -------
    InputFormatError
        For floats, booleans and unparsable strings
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise InputFormatError(f"{name}: rationals must be integers or 'p/q' strings, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"{name}: cannot parse {value!r} as a rational") from exc
    raise InputFormatError(f"{name}: expected a rational, got {type(value).__name__}")


def parse_endpoint(value: Any, name: str = "endpoint"):
    if isinstance(value, str) and value.strip().lstrip("+-") in ("inf", "infinity"):
        return as_endpoint(value)
    return parse_rational(value, name)


def format_rational(value) -> str:
    """'p/q' for rationals, 'inf' / '-inf' for infinite endpoints."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(Fraction(value))


def _require(document: Dict, key: str, context: str):
    if key not in document:
        raise InputFormatError(f"{context}: missing field {key!r}")
    return document[key]


def _pairs(items, name: str) -> Tuple[Tuple[Fraction, Fraction], ...]:
    try:
        return tuple((parse_rational(a, name), parse_rational(b, name)) for a, b in items)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(f"{name}: expected a list of [location, multiplicity] pairs") from exc


# ---------------------------------------------------------------------------
# Constants, phi and representations
# ---------------------------------------------------------------------------

def constant_from_json(value) -> LogCombination:
    """A constant is a rational, or {"rational": q0, "logs": [[q, r], ...]} for q0 + sum q ln r."""
    if isinstance(value, dict):
        logs = tuple((parse_rational(q, "c.logs"), parse_rational(r, "c.logs")) for q, r in value.get("logs", []))
        if any(r <= 0 for _, r in logs):
            raise InputFormatError("c.logs: logarithm arguments must be positive")
        return LogCombination(parse_rational(value.get("rational", 0), "c.rational"), logs)
    return LogCombination(parse_rational(value, "c"))


def constant_to_json(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, LogCombination):
        if value.is_rational:
            return format_rational(value.rational)
        return {
            "rational": format_rational(value.rational),
            "logs": [[format_rational(q), format_rational(r)] for q, r in value.logs],
        }
    return format_rational(value)


def phi_from_json(document: Dict) -> PhiFunction:
    """
    Build phi from {"steps": [...], "analytic": [...]}.

    Steps are {"lo", "hi", "value"}; analytic pieces carry "kind" (one of
    power_law, linear, two_pole_arg, bessel_arg), "lo", "hi" and the
    parameters of that kind.
    """
    if not isinstance(document, dict):
        raise InputFormatError("phi must be an object with 'steps' and/or 'analytic'")
    try:
        steps = tuple(
            StepPiece(parse_endpoint(s["lo"], "phi.steps.lo"), parse_endpoint(s["hi"], "phi.steps.hi"),
                      parse_rational(s["value"], "phi.steps.value"))
            for s in document.get("steps", [])
        )
        analytic = []
        for piece in document.get("analytic", []):
            kind = piece.get("kind")
            if kind not in ANALYTIC_KINDS:
                raise InputFormatError(f"phi.analytic: unknown kind {kind!r}; choose from {sorted(ANALYTIC_KINDS)}")
            params = {k: parse_rational(v, f"phi.analytic.{k}") for k, v in piece.items()
                      if k not in ("kind", "lo", "hi")}
            analytic.append(ANALYTIC_KINDS[kind](parse_endpoint(piece["lo"], "phi.analytic.lo"),
                                                 parse_endpoint(piece["hi"], "phi.analytic.hi"), **params))
        return PhiFunction(steps, tuple(analytic))
    except KeyError as exc:
        raise InputFormatError(f"phi: missing field {exc}") from exc
    except TypeError as exc:
        raise InputFormatError(f"phi: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(f"phi: {exc}") from exc


def phi_to_json(phi: PhiFunction) -> Dict:
    out: Dict[str, List] = {
        "steps": [
            {"lo": format_rational(p.lo), "hi": format_rational(p.hi), "value": format_rational(p.value)}
            for p in phi.steps
        ],
    }
    if phi.analytic:
        out["analytic"] = []
        for piece in phi.analytic:
            entry = {"kind": piece.kind, "lo": format_rational(piece.lo), "hi": format_rational(piece.hi)}
            entry.update({k: format_rational(v) for k, v in piece.params().items()})
            if piece.shift:
                entry["shift"] = format_rational(piece.shift)
            out["analytic"].append(entry)
    return out


def representation_from_json(document: Dict) -> BellRepresentation:
    try:
        return BellRepresentation(
            a=parse_rational(document.get("a", 0), "a"),
            b=parse_rational(document.get("b", 0), "b"),
            c=constant_from_json(document.get("c", 0)),
            phi=phi_from_json(document.get("phi", {})),
        )
    except ValueError as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(str(exc)) from exc


def representation_to_json(rep: BellRepresentation, name: Optional[str] = None) -> Dict:
    out = {
        "kind": "representation",
        "a": format_rational(rep.a),
        "b": constant_to_json(rep.b),
        "c": constant_to_json(rep.c),
        "phi": phi_to_json(rep.phi),
    }
    if name:
        out["name"] = name
    return out


def closed_form_from_json(document: Dict) -> FourierTransform:
    """Closed-form transform named by "kind" with its parameters."""
    kind = _require(document, "kind", "closed_form")
    if kind == "gaussian":
        return gaussian_transform(parse_rational(document.get("a", 1), "closed_form.a"))
    if kind == "cauchy":
        return cauchy_transform(parse_rational(document.get("scale", 1), "closed_form.scale"))
    if kind == "rational":
        return rational_transform(_pairs(document.get("poles", []), "closed_form.poles"),
                                  _pairs(document.get("zeros", []), "closed_form.zeros"),
                                  parse_rational(document.get("shift", 0), "closed_form.shift"))
    if kind == "two_pole":
        return two_pole_transform(parse_rational(document.get("p", 1), "closed_form.p"),
                                  parse_rational(document.get("q", 2), "closed_form.q"))
    if kind == "bessel":
        return bessel_transform(parse_rational(document.get("p", 1), "closed_form.p"))
    raise InputFormatError(f"closed_form: unknown kind {kind!r}; choose from {CLOSED_FORMS}")


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

@dataclass
class RepresentationDocument:
    """
    A loaded representation document.

    transform is the closed form when the document names one (or when the
    kind implies it); otherwise the numeric transform of the representation.
    """

    name: str
    kind: str
    representation: BellRepresentation
    transform: FourierTransform
    closed_form: bool
    source: Dict = field(default_factory=dict)


def representation_document(document: Dict, name: str = "representation") -> RepresentationDocument:
    """
    Interpret a parsed JSON object as a representation document.

    Kinds:
    - "representation": explicit a, b, c, phi and optional "closed_form"
    - "rational": "poles", "zeros" as [location, multiplicity] pairs, "shift"
    - "stable": "alpha", "c_plus", "c_minus", "normalise" (default true)
    - "polya": "a", "b", "zeros", "geometric_scale"
    """
    if not isinstance(document, dict):
        raise InputFormatError("A representation document must be a JSON object")
    kind = document.get("kind", "representation")
    name = document.get("name", name)
    try:
        if kind == "representation":
            rep = representation_from_json(document)
            if "closed_form" in document:
                return RepresentationDocument(name, kind, rep, closed_form_from_json(document["closed_form"]),
                                              True, document)
            return RepresentationDocument(name, kind, rep, representation_transform(rep, name), False, document)
        if kind == "rational":
            poles = _pairs(_require(document, "poles", name), "poles")
            zeros = _pairs(document.get("zeros", []), "zeros")
            shift = parse_rational(document.get("shift", 0), "shift")
            rep = representation_from_interlacing_rational(poles, zeros, shift)
            return RepresentationDocument(name, kind, rep, rational_transform(poles, zeros, shift), True, document)
        if kind == "stable":
            alpha = parse_rational(_require(document, "alpha", name), "alpha")
            c_plus = parse_rational(document.get("c_plus", 1), "c_plus")
            c_minus = parse_rational(document.get("c_minus", 1), "c_minus")
            normalise = bool(document.get("normalise", True))
            rep = stable_representation(alpha, c_plus, c_minus, normalise)
            return RepresentationDocument(name, kind, rep, stable_fourier(alpha, c_plus, c_minus, normalise),
                                          True, document)
        if kind == "polya":
            scale = document.get("geometric_scale")
            params = PolyaParams(
                a=parse_rational(document.get("a", 0), "a"),
                b=parse_rational(document.get("b", 0), "b"),
                zeros=tuple(parse_rational(z, "zeros") for z in document.get("zeros", [])),
                geometric_scale=parse_rational(scale, "geometric_scale") if scale is not None else None,
            )
            rep = BellRepresentation(a=params.a, b=params.b, phi=polya_phi(params))
            return RepresentationDocument(name, kind, rep, polya_fourier(params), True, document)
    except InputFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputFormatError(f"{name}: {exc}") from exc
    raise InputFormatError(f"{name}: unknown kind {kind!r}; choose from {REPRESENTATION_KINDS}")


@dataclass
class FunctionDocument:
    """An exact function for sign-change certificates, with optional sample points."""

    name: str
    kind: str
    function: Any
    samples: Tuple[Fraction, ...] = ()


def function_document(document: Dict, name: str = "function") -> FunctionDocument:
    """
    Interpret a parsed JSON object as an exact function.

    - {"kind": "rational", "numerator": "1", "denominator": "(1 + x**2)*(9 + x**2)"}
      with sympy expressions in x
    - {"kind": "exp_poly", "pieces": [{"lo": "0", "hi": "inf",
      "terms": [[coefficient, power, rate, pi_power], ...]}]}
      where each term is coefficient * x^power * e^(rate x) * pi^(pi_power/2)
    """
    if not isinstance(document, dict):
        raise InputFormatError("A function document must be a JSON object")
    kind = _require(document, "kind", name)
    name = document.get("name", name)
    samples = tuple(parse_rational(x, "samples") for x in document.get("samples", []))
    if kind == "rational":
        try:
            numerator = sympy.sympify(_require(document, "numerator", name), locals={"x": X})
            denominator = sympy.sympify(document.get("denominator", "1"), locals={"x": X})
            function = RationalFunctionExact.from_exprs(numerator, denominator)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise InputFormatError(f"{name}: numerator and denominator must be polynomials in x ({exc})") from exc
        return FunctionDocument(name, kind, function, samples)
    if kind == "exp_poly":
        try:
            pieces = []
            for piece in _require(document, "pieces", name):
                terms = tuple(ExpPolyTerm(*(parse_rational(v, "terms") if i < 3 else int(v)
                                            for i, v in enumerate(term)))
                              for term in piece["terms"])
                pieces.append(ExpPolyPiece(parse_endpoint(piece["lo"], "lo"), parse_endpoint(piece["hi"], "hi"), terms))
            return FunctionDocument(name, kind, ExpPolySum(tuple(pieces)), samples)
        except KeyError as exc:
            raise InputFormatError(f"{name}: missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputFormatError):
                raise
            raise InputFormatError(f"{name}: {exc}") from exc
    raise InputFormatError(f"{name}: unknown kind {kind!r}; choose from {FUNCTION_KINDS}")


def read_json(path: str) -> Dict:
    if not os.path.exists(path):
        raise InputFormatError(f"File not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON ({exc})") from exc


def write_json(document: Any, path: str) -> None:
    """Deterministic JSON (sorted keys, two-space indent, trailing newline)."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(document, indent=2, sort_keys=True) + "\n")


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def load_representation(path: str) -> RepresentationDocument:
    return representation_document(read_json(path), _stem(path))


def load_function(path: str) -> FunctionDocument:
    return function_document(read_json(path), _stem(path))


def load_representations(data_dir: str = "Data/representations") -> Dict[str, RepresentationDocument]:
    """
    Load every representation document in a directory.

    Notes:
    ------
    Files that fail to parse are logged and skipped.
    """
    if not os.path.exists(data_dir):
        raise FileNotFoundError(f"Data directory not found: {data_dir}")
    documents = {}
    for file in sorted(f for f in os.listdir(data_dir) if f.endswith(".json")):
        try:
            document = load_representation(os.path.join(data_dir, file))
        except InputFormatError as exc:
            logger.warning("skipping %s: %s", file, exc)
            continue
        documents[document.name] = document
        logger.info("loaded %s (%s)", file, document.kind)
    return documents
