"""
Command-line front end: ``python -m specker_kit <command> ...``.

Reports go to standard output as JSON (or a table with ``--format table``);
logs go to standard error. Exit status: 0 success, 2 invalid input,
3 infeasible (a successful analysis), 1 internal error.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ValidationError
from tabulate import tabulate

from .config import get_settings
from .console import configure_logging
from .exceptions import (
    ChainViolation,
    DocumentError,
    InvalidDecomposition,
    ModelError,
    QuantumStateError,
    SpeckerKitError,
    StatisticsValidationError,
)
from .models import REPORT_MODELS, ErrorResult, Report, ViolationModel
from .services import analysis_service, quantum, sampling, translation_tools
from .services.marginal_scenario import stats_from_correlation_vector, specker_scenario
from .services.scenario_core import parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

INPUT_ERRORS = (
    DocumentError,
    StatisticsValidationError,
    ChainViolation,
    ModelError,
    InvalidDecomposition,
    QuantumStateError,
    ValueError,
)


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except SpeckerKitError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _rational_list(text: str) -> List[Fraction]:
    return [_rational(part) for part in text.split(",") if part.strip()]


def _eta_grid(text: str) -> List[float]:
    """``a:b:step`` inclusive of b when it falls on the grid, or a comma-separated list."""
    if ":" not in text:
        return [float(v) for v in _rational_list(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("eta grid must read a:b:step")
    start, stop, step = (_rational(p) for p in parts)
    if step <= 0 or start > stop:
        raise argparse.ArgumentTypeError("eta grid needs a <= b and a positive step")
    count = int((stop - start) / step)
    return [float(start + k * step) for k in range(count + 1)]


def _state(text: str) -> Optional[Tuple[float, float, float]]:
    if text == "mixed":
        return None
    if not text.startswith("bloch:"):
        raise argparse.ArgumentTypeError("state must be 'mixed' or 'bloch:x,y,z'")
    values = [float(v) for v in _rational_list(text[len("bloch:"):])]
    if len(values) != 3:
        raise argparse.ArgumentTypeError("a Bloch vector has three components")
    return tuple(values)


def _directions(text: str) -> List[Tuple[float, float, float]]:
    if text == "trine":
        return list(quantum.trine_directions())
    data = translation_tools.load_json(text)
    if not isinstance(data, list) or len(data) != 3 or any(not isinstance(d, list) or len(d) != 3 for d in data):
        raise DocumentError("expected a list of three 3-vectors", text)
    return [tuple(float(v) for v in d) for d in data]


def _correlation_input(path: str):
    return translation_tools.translate_correlation_document(translation_tools.load_json(path))


# --- Commands ---

def cmd_check(args) -> Tuple[dict, BaseModel, int]:
    cv = _correlation_input(args.input)
    eta0s = [e for group in args.eta0 for e in group]
    result = analysis_service.check_result(cv, eta0s)
    return {"input": args.input, "eta0": [str(e) for e in eta0s]}, result, EXIT_OK


def cmd_vertices(args):
    return {}, analysis_service.vertices_result(), EXIT_OK


def cmd_decompose(args):
    cv = _correlation_input(args.input)
    return {"input": args.input}, analysis_service.decompose_result(cv), EXIT_OK


def cmd_fine(args):
    if args.model:
        model = translation_tools.translate_model_document(translation_tools.load_json(args.model))
        result = analysis_service.model_fine_result(model)
        inputs = {"model": args.model}
    else:
        data = translation_tools.load_json(args.input)
        if isinstance(data, dict) and "measurements" in data:
            scenario, stats = translation_tools.translate_scenario_document(data)
        else:
            scenario = specker_scenario()
            stats = stats_from_correlation_vector(translation_tools.translate_correlation_document(data))
        result = analysis_service.fine_result(scenario, stats)
        inputs = {"input": args.input}
    status = EXIT_INFEASIBLE if result.status == "infeasible" else EXIT_OK
    return inputs, result, status


def cmd_ontmax(args):
    if args.etas is not None and len(args.etas) != 3:
        raise UsageError("--etas takes exactly three comma-separated values")
    result = analysis_service.ontmax_result(args.which, eta=args.eta, etas=args.etas)
    inputs = {"which": args.which, "eta": None if args.eta is None else str(args.eta),
              "etas": None if args.etas is None else [str(e) for e in args.etas]}
    return inputs, result, EXIT_OK


def cmd_relabel(args):
    cv = _correlation_input(args.input)
    result = analysis_service.relabel_result(cv, args.measurement)
    return {"input": args.input, "measurement": args.measurement}, result, EXIT_OK


def cmd_quantum_scan(args):
    directions = _directions(args.directions)
    result = quantum.lsw_scan(
        directions,
        args.eta_grid,
        state=args.state,
        optimize_state=args.optimize_state,
        workers=args.workers,
    )
    if args.csv:
        quantum.write_scan_csv(result, args.csv)
        logger.info(f"[SCAN] CSV written to {args.csv}")
    inputs = {
        "directions": [list(d) for d in directions],
        "eta_grid": args.eta_grid,
        "state": "mixed" if args.state is None else list(args.state),
        "optimize_state": args.optimize_state,
    }
    return inputs, result, EXIT_OK


def cmd_audit(args):
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    result = sampling.audit(args.samples, args.seed)
    return {"samples": args.samples, "seed": args.seed, "generator": sampling.GENERATOR}, result, EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "check": cmd_check,
    "vertices": cmd_vertices,
    "decompose": cmd_decompose,
    "fine": cmd_fine,
    "ontmax": cmd_ontmax,
    "relabel": cmd_relabel,
    "quantum-scan": cmd_quantum_scan,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specker_kit",
        description="Contextuality analysis of Specker's scenario.",
        epilog="Run 'specker_kit schema <command>' for the JSON schema of a command's report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=("json", "table"), default="json")
        return p

    p = with_format(sub.add_parser("check", help="R values, KS/NC violations and polytope membership"))
    p.add_argument("--input", required=True, help="correlation document (JSON)")
    p.add_argument("--eta0", type=_rational_list, action="append", default=[],
                   help="predictability values for the NC inequalities (repeatable, comma-separated)")

    with_format(sub.add_parser("vertices", help="the 12 vertices of the Specker polytope"))

    p = sub.add_parser("decompose", help="convex decomposition over the vertices")
    p.add_argument("--input", required=True)

    p = sub.add_parser("fine", help="joint distribution or infeasibility certificate")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="correlation or scenario document (JSON)")
    source.add_argument("--model", help="ontological model document (JSON)")

    p = sub.add_parser("ontmax", help="noncontextual maximum of R0..R3")
    p.add_argument("--which", choices=("R0", "R1", "R2", "R3"), default="R3")
    sharpness = p.add_mutually_exclusive_group(required=True)
    sharpness.add_argument("--eta", type=_rational)
    sharpness.add_argument("--etas", type=_rational_list, help="three sharpness values (research mode)")

    p = sub.add_parser("relabel", help="swap the outcomes of one or more measurements")
    p.add_argument("--input", required=True)
    p.add_argument("--measurement", type=int, choices=(1, 2, 3), action="append", required=True)

    p = with_format(sub.add_parser("quantum-scan", help="search for quantum violations over a sharpness grid"))
    p.add_argument("--directions", default="trine", help="'trine' or a JSON file with three unit vectors")
    p.add_argument("--eta-grid", type=_eta_grid, default=_eta_grid("0:1:1/10"))
    p.add_argument("--state", type=_state, default=None, help="'mixed' or 'bloch:x,y,z'")
    p.add_argument("--optimize-state", action="store_true", help="maximise R3 over pure states per grid point")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", help="also write the rows as CSV")

    p = sub.add_parser("audit", help="seeded checks of exclusivity and oracle agreement")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("schema", help="JSON schema of a command's report")
    p.add_argument("name", choices=sorted(REPORT_MODELS))
    return parser


# --- Output ---

def _table(command: str, results: BaseModel) -> str:
    if command == "vertices":
        rows = [[v.id, v.kind, *(" ".join(v.pairs[k]) for k in ("12", "23", "13")), ",".join(v.ks_violations)]
                for v in results.vertices]
        return tabulate(rows, headers=["id", "kind", "12", "23", "13", "KS violated"], tablefmt="grid")
    if command == "check":
        rows = [[label, value, "yes" if label in results.ks_violations else ""]
                for label, value in results.r_values.items()]
        headers = ["R", "value", "KS violated"]
        for nc in results.nc:
            headers.append(f"NC eta0={nc.eta0}")
            for row in rows:
                row.append("yes" if row[0] in nc.violations else "")
        return tabulate(rows, headers=headers, tablefmt="grid")
    if command == "quantum-scan":
        rows = [
            [r.eta, r.feasible, r.R3, r.bound, r.violated,
             *(r.relabelled[k].value if k in r.relabelled else None for k in ("R0", "R1", "R2")), r.error or ""]
            for r in results.rows
        ]
        return tabulate(rows, headers=["eta", "feasible", "R3", "3-eta", "violated", "R0", "R1", "R2", "error"],
                        tablefmt="grid")
    raise UsageError(f"no table layout for {command}")


def emit(report: Report) -> None:
    sys.stdout.write(json.dumps(report.model_dump(mode="json"), indent=2) + "\n")


def _error_report(command: str, inputs: dict, exc: Exception, status: int) -> Report:
    violations = [ViolationModel(**v.as_dict()) for v in getattr(exc, "violations", ())]
    if isinstance(exc, DocumentError):
        results = ErrorResult(error=exc.detail, location=exc.location)
    elif isinstance(exc, ValidationError):
        first = exc.errors()[0]
        results = ErrorResult(error=first["msg"], location=".".join(map(str, first["loc"])))
    else:
        results = ErrorResult(error=str(exc), violations=violations)
    return REPORT_MODELS["error"](command=command, inputs=inputs, exit_status=status, results=results)


def run(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    configure_logging(settings.log_level)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID

    if args.command == "schema":
        sys.stdout.write(json.dumps(REPORT_MODELS[args.name].model_json_schema(), indent=2) + "\n")
        return EXIT_OK

    inputs: dict = {}
    try:
        inputs, results, status = COMMANDS[args.command](args)
        report = REPORT_MODELS[args.command](command=args.command, inputs=inputs, exit_status=status, results=results)
        if getattr(args, "format", "json") == "table":
            sys.stdout.write(_table(args.command, results) + "\n")
        else:
            emit(report)
        return status
    except UsageError as e:
        parser.print_usage(sys.stderr)
        logger.error(f"[ERROR] {e}")
        emit(_error_report(args.command, inputs, e, EXIT_INVALID))
        return EXIT_INVALID
    except INPUT_ERRORS as e:
        logger.error(f"[VALIDATION FAILED] {e}")
        emit(_error_report(args.command, inputs, e, EXIT_INVALID))
        return EXIT_INVALID
    except Exception as e:
        logger.exception(f"[ERROR] {args.command} failed")
        emit(_error_report(args.command, inputs, e, EXIT_INTERNAL))
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
