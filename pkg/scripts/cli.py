"""
Command Line Interface

Scripted access to the library for verification runs and plot-data export:

    bellshape check-phi Data/representations/ex61.json
    bellshape eval Data/representations/gaussian.json --xi 0.5
    bellshape density Data/representations/ex61.json --x 0.5 1 2 --t 0.001 --n 2
    bellshape bell-test Data/representations/ex61.json --nmax 2 --t 0.001
    bellshape sign-changes --exact Data/functions/ex65.json --n 57
    bellshape verify --case 6.5b

Exit codes: 0 all checks pass, 1 a claim or verdict fails, 2 input or
format error, 3 precision exhausted or unstable numerics.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .data_loader import format_rational, load_function, load_representation, parse_rational
from .data_processing import (
    bell_test_frame,
    claims_frame,
    density_frame,
    format_frame,
    level_crossing_frame,
    transform_frame,
)
from .errors import BellShapeError, InputFormatError, PrecisionExhausted, UnknownCase, Unstable
from .exact_core import count_sign_changes_exact, diff_exppoly, diff_rational, eval_exact, sign_certified, \
    sign_changes_lower_bound
from .examples import case_ids, get_case, run_all
from .numeric import QuadratureOptions, bell_test, invert_transform
from .representation import (
    check_boundary_conditions,
    check_level_crossing,
    check_tail_integrability,
    transform_from_representation,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3

FORMATS = ("json", "csv", "text")


@dataclass
class CliConfig:
    """
    Settings shared by every subcommand.

    Attributes:
    -----------
    precision : int
        Working decimal digits for mpmath; defaults to QuadratureOptions
        (or BELLSHAPE_PRECISION when set)
    abs_tol, rel_tol : float
        Quadrature tolerances
    fmt : str, optional
        "json", "csv" or "text"; None selects the subcommand's default
    output : str, optional
        Output path; stdout when None
    float_digits : int
        Significant digits of floats in csv/text tables
    """

    precision: int
    abs_tol: float
    rel_tol: float
    fmt: Optional[str] = None
    output: Optional[str] = None
    float_digits: int = 17
    verbose: bool = False
    quiet: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        defaults = QuadratureOptions.from_env()
        return cls(
            precision=args.precision if args.precision is not None else defaults.working_dps,
            abs_tol=args.abs_tol if args.abs_tol is not None else defaults.abs_tol,
            rel_tol=args.rel_tol if args.rel_tol is not None else defaults.rel_tol,
            fmt=args.format,
            output=args.output,
            float_digits=args.float_digits,
            verbose=args.verbose,
            quiet=args.quiet,
        )

    def options(self) -> QuadratureOptions:
        return QuadratureOptions(abs_tol=self.abs_tol, rel_tol=self.rel_tol, working_dps=self.precision)

    def precision_field(self) -> Dict[str, Any]:
        return {"working_dps": self.precision, "abs_tol": self.abs_tol, "rel_tol": self.rel_tol}

    @property
    def show_progress(self) -> bool:
        return not self.quiet and sys.stderr.isatty()


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _dumps(payload: Dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if hasattr(value, "item"):
        return value.item()
    return str(value)


def _emit(text: str, config: CliConfig) -> None:
    if config.output:
        with open(config.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(payload: Dict, frame, config: CliConfig, default: str = "json") -> None:
    fmt = config.fmt or default
    if fmt == "json":
        _emit(_dumps(payload), config)
    else:
        _emit(format_frame(frame, fmt, config.float_digits), config)


def _float_list(values: Sequence[str], name: str) -> List[float]:
    out = []
    for value in values:
        for item in str(value).split(","):
            item = item.strip()
            if not item:
                continue
            try:
                out.append(float(Fraction(item)))
            except (ValueError, ZeroDivisionError) as exc:
                raise InputFormatError(f"--{name}: cannot parse {item!r}") from exc
    if not out:
        raise InputFormatError(f"--{name}: at least one value is required")
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_check_phi(args: argparse.Namespace, config: CliConfig) -> int:
    document = load_representation(args.representation)
    level = check_level_crossing(document.representation.phi, args.kmax)
    tail = check_tail_integrability(document.representation.phi)
    boundary = check_boundary_conditions(document.transform)
    passed = level.passed and tail.finite
    payload = {
        "name": document.name,
        "passed": passed,
        "level_crossing": level.to_dict(),
        "tail_integrability": tail.to_dict(),
        "boundary_conditions": boundary.to_dict(),
    }
    _emit_table(payload, level_crossing_frame(level), config)
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_eval(args: argparse.Namespace, config: CliConfig) -> int:
    document = load_representation(args.representation)
    xi = _float_list(args.xi, "xi")
    values = []
    for point in xi:
        if args.closed_form or point == 0:
            values.append(complex(document.transform.mp(point)) if point else document.transform.at_zero())
        else:
            values.append(transform_from_representation(document.representation, point, config.precision))
    payload = {
        "name": document.name,
        "precision": config.precision_field(),
        "values": [{"xi": x, "re": v.real, "im": v.imag} for x, v in zip(xi, values)],
    }
    _emit_table(payload, transform_frame(xi, values), config)
    return EXIT_OK


def cmd_density(args: argparse.Namespace, config: CliConfig) -> int:
    document = load_representation(args.representation)
    xs = _float_list(args.x, "x")
    opts = config.options()
    values = [invert_transform(document.transform, x, args.n, args.t, opts) for x in xs]
    payload = {
        "name": document.name,
        "n": args.n,
        "t": args.t,
        "precision": config.precision_field(),
        "values": [{"x": x, "value": v} for x, v in zip(xs, values)],
    }
    _emit_table(payload, density_frame(xs, values), config, default="csv")
    return EXIT_OK


def cmd_bell_test(args: argparse.Namespace, config: CliConfig) -> int:
    document = load_representation(args.representation)
    orders = [int(n) for n in _float_list(args.orders, "orders")] if args.orders else None
    try:
        report = bell_test(document.transform, args.nmax, args.t, opts=config.options(), orders=orders,
                           show_progress=config.show_progress)
    except Unstable as exc:
        if exc.report is not None:
            _emit_table({"name": document.name, **exc.report.to_dict()}, bell_test_frame(exc.report), config)
        raise
    payload = {"name": document.name, "precision": config.precision_field(), **report.to_dict()}
    _emit_table(payload, bell_test_frame(report), config)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_sign_changes(args: argparse.Namespace, config: CliConfig) -> int:
    document = load_function(args.exact)
    if document.kind == "rational":
        derivative = diff_rational(document.function, args.n)
        count = count_sign_changes_exact(derivative)
        payload = {
            "name": document.name,
            "n": args.n,
            "certificate": "exact count",
            "count": count,
            "numerator_degree": derivative.numerator.degree,
            "denominator_degree": derivative.denominator.degree,
        }
        if (config.fmt or "json") == "json":
            _emit(_dumps(payload), config)
        else:
            _emit(f"sign changes of f^({args.n}): {count}\n", config)
        return EXIT_OK

    samples = [parse_rational(x, "--at") for x in args.at] if args.at else list(document.samples)
    if not samples:
        raise InputFormatError("Exponential polynomials need sample points (--at or 'samples' in the document)")
    derivative = diff_exppoly(document.function, args.n)
    rows = []
    for x in sorted(samples):
        value = eval_exact(derivative, x)
        rows.append({"x": format_rational(x), "value": str(value), "sign": sign_certified(value)})
    bound = sign_changes_lower_bound(derivative, samples)
    payload = {"name": document.name, "n": args.n, "certificate": "lower bound", "count": bound, "samples": rows}
    if (config.fmt or "json") == "json":
        _emit(_dumps(payload), config)
    else:
        lines = [f"f^({args.n})({r['x']}) = {r['value']}  sign {r['sign']:+d}" for r in rows]
        lines.append(f"sign changes of f^({args.n}): >= {bound}")
        _emit("\n".join(lines) + "\n", config)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: CliConfig) -> int:
    if args.list:
        _emit("".join(f"{cid}\t{get_case(cid).title}\n" for cid in case_ids()), config)
        return EXIT_OK
    suite = run_all(args.case or None, config.options(), include_slow=not args.fast, jobs=args.jobs,
                    show_progress=config.show_progress)
    fmt = config.fmt or "text"
    if fmt == "json":
        _emit(suite.to_json() + "\n", config)
    elif fmt == "csv":
        _emit(format_frame(claims_frame(suite), "csv", config.float_digits), config)
    else:
        lines = []
        for case in suite.cases:
            if len(suite.cases) > 1:
                lines.append(f"[{case.id}] {case.title}")
            lines.extend(r.line() for r in case.results if r.verdict != "skipped")
        counts = suite.counts()
        if not config.quiet:
            lines.append(", ".join(f"{counts[v]} {v}" for v in counts if counts[v]))
        _emit("\n".join(lines) + "\n", config)

    if any(r.error_type in (PrecisionExhausted.__name__, Unstable.__name__) for r in suite.results):
        return EXIT_PRECISION
    return EXIT_OK if suite.passed else EXIT_FAILURE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="Output format")
    common.add_argument("--output", "-o", default=None, help="Write output to this file")
    common.add_argument("--precision", type=int, default=None,
                        help="Working decimal digits (default: BELLSHAPE_PRECISION or 30)")
    common.add_argument("--abs-tol", type=float, default=None, help="Absolute quadrature tolerance")
    common.add_argument("--rel-tol", type=float, default=None, help="Relative quadrature tolerance")
    common.add_argument("--float-digits", type=int, default=17, help="Significant digits in csv/text tables")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="No progress bars or summaries")

    parser = argparse.ArgumentParser(
        prog="bellshape",
        description="Exact and numeric checks of bell-shape for functions given by their exponential representation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-phi", parents=[common], help="Level crossing, tail and boundary checks of phi")
    p.add_argument("representation", help="Representation JSON document")
    p.add_argument("--kmax", type=int, default=None, help="Largest level k")
    p.set_defaults(handler=cmd_check_phi)

    p = sub.add_parser("eval", parents=[common], help="Transform values F(i xi)")
    p.add_argument("representation")
    p.add_argument("--xi", nargs="+", required=True, help="Frequencies (space or comma separated)")
    p.add_argument("--closed-form", action="store_true", help="Evaluate the document's closed form instead")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("density", parents=[common], help="Values of (f * G_t)^(n) by Fourier inversion")
    p.add_argument("representation")
    p.add_argument("--x", nargs="+", required=True, help="Evaluation points")
    p.add_argument("--t", type=float, default=0.0, help="Heat parameter")
    p.add_argument("--n", type=int, default=0, help="Derivative order")
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("bell-test", parents=[common], help="Numeric sign-change counts of (f * G_t)^(n)")
    p.add_argument("representation")
    p.add_argument("--nmax", type=int, required=True, help="Largest derivative order")
    p.add_argument("--t", type=float, required=True, help="Heat parameter, t > 0")
    p.add_argument("--orders", nargs="+", default=None, help="Only these orders")
    p.set_defaults(handler=cmd_bell_test)

    p = sub.add_parser("sign-changes", parents=[common], help="Exact sign-change counts and certificates")
    p.add_argument("--exact", required=True, help="Function JSON document")
    p.add_argument("--n", type=int, default=0, help="Derivative order")
    p.add_argument("--at", nargs="+", default=None, help="Rational sample points for exponential polynomials")
    p.set_defaults(handler=cmd_sign_changes)

    p = sub.add_parser("verify", parents=[common], help="Run the example catalog")
    p.add_argument("--case", action="append", default=None, help="Case id (repeatable); all cases by default")
    p.add_argument("--fast", action="store_true", help="Skip slow claims")
    p.add_argument("--jobs", "-j", type=int, default=1, help="Cases run concurrently")
    p.add_argument("--list", action="store_true", help="List case ids and exit")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    try:
        config = CliConfig.from_args(args)
        config.options()
        return args.handler(args, config)
    except (PrecisionExhausted, Unstable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (InputFormatError, UnknownCase) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BellShapeError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
