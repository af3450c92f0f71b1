"""
Command-line front end.

Sub-commands:
    derive NAME|FILE       derive and verify (F, Omega) from a superpotential
    verify FILE            check a user-supplied (F, Omega) without derivation
    catalog list|show      the built-in families
    elliptic-check         numeric verification of the genus-one family

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from . import __version__, catalog
from .config import settings
from .errors import CatalogError, OpenWDVVError, SpecParseError
from .pipeline import RunOptions, report_json, workflow
from .schemas import Report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="owdvv", description="Open WDVV solutions from Landau-Ginzburg superpotentials")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging on stderr (-v INFO, -vv DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--out", type=Path, help="Write the JSON report to this file instead of stdout")
        p.add_argument("--summary", action="store_true", help="Print a human summary to stderr")
        p.add_argument("--q-terms", type=int, help="Theta and E2 truncation")
        p.add_argument("--tol", type=float, help="Numeric pass threshold")
        p.add_argument("--samples", type=int, help="Number of seeded numeric samples")
        p.add_argument("--seed", type=int, help="Seed for every numeric sample")
        p.add_argument("--timings", action="store_true", help="Record wall-clock timings in the report")

    derive = sub.add_parser("derive", help="Derive and verify from a catalog family or a spec file")
    derive.add_argument("target", help="Catalog name (e.g. h0_2, h0_n(4)) or path to a .toml/.json spec file")
    derive.add_argument("-n", type=int, help="Parameter of h0_n and h0_n_0")
    derive.add_argument("--no-calibration", action="store_true", help="Skip the comparison with the printed solution")
    derive.add_argument("--engine", choices=["complement", "trace"], default="complement", help="Exact residue engine")
    add_common(derive)

    verify = sub.add_parser("verify", help="Check a spec file carrying F and Omega")
    verify.add_argument("specfile", type=Path)
    add_common(verify)

    cat = sub.add_parser("catalog", help="List or describe the built-in families")
    cat.add_argument("action", choices=["list", "show"])
    cat.add_argument("name", nargs="?", help="Family name for show")
    cat.add_argument("-n", type=int, help="Parameter of h0_n and h0_n_0")
    cat.add_argument("--out", type=Path, help="Write the JSON to this file instead of stdout")

    elliptic = sub.add_parser("elliptic-check", help="Numeric verification of the genus-one family")
    add_common(elliptic)
    return parser


def _options(args: argparse.Namespace) -> RunOptions:
    return RunOptions(
        q_terms=args.q_terms,
        tol=args.tol,
        samples=args.samples,
        seed=args.seed,
        calibration=not getattr(args, "no_calibration", False),
        timings=args.timings,
        engine=getattr(args, "engine", "complement"),
    )


def _validate_numeric_flags(args: argparse.Namespace):
    for flag in ("q_terms", "samples"):
        value = getattr(args, flag, None)
        if value is not None and value < 1:
            raise SpecParseError(f"--{flag.replace('_', '-')} must be at least 1")
    tol = getattr(args, "tol", None)
    if tol is not None and tol <= 0:
        raise SpecParseError("--tol must be positive")


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text + "\n")
        sys.stdout.flush()
    else:
        out.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Report written to {out}")


def summarize(report: Report) -> str:
    lines = [f"{report.source} ({report.mode}, {report.chart})"]
    if report.F:
        lines.append(f"  F     = {report.F}")
    if report.Omega_human or report.Omega:
        lines.append(f"  Omega = {report.Omega_human or report.Omega}")
    for check in report.checks:
        status = "ok  " if check.passed else "FAIL"
        extra = f" (max residual {check.max_residual:.3e})" if check.max_residual is not None else ""
        lines.append(f"  [{status}] {check.name}{extra}")
    for comparison in report.calibration:
        status = "match" if comparison.matches else "differs"
        lines.append(f"  printed {comparison.target}: {status}")
    for warning in report.warnings:
        lines.append(f"  note: {warning}")
    return "\n".join(lines)


def _finish(report: Report, args: argparse.Namespace) -> int:
    _emit(report_json(report), args.out)
    if args.summary:
        sys.stderr.write(summarize(report) + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_derive(args: argparse.Namespace) -> int:
    _validate_numeric_flags(args)
    options = _options(args)
    path = Path(args.target)
    if path.suffix.lower() in (".toml", ".json") or path.exists():
        if not path.exists():
            raise SpecParseError(f"spec file {path} does not exist")
        report = workflow.derive_file(path, options)
    else:
        name, n = catalog.parse_name(args.target)
        report = workflow.derive_catalog(name, args.n if args.n is not None else n, options)
    return _finish(report, args)


def cmd_verify(args: argparse.Namespace) -> int:
    _validate_numeric_flags(args)
    if not args.specfile.exists():
        raise SpecParseError(f"spec file {args.specfile} does not exist")
    report = workflow.verify_file(args.specfile, _options(args))
    return _finish(report, args)


def cmd_catalog(args: argparse.Namespace) -> int:
    if args.action == "list":
        data = [listing.model_dump() for listing in catalog.list_entries()]
    else:
        if not args.name:
            raise CatalogError("catalog show needs a family name")
        name, n = catalog.parse_name(args.name)
        data = catalog.describe(catalog.get(name, args.n if args.n is not None else n))
    _emit(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False), args.out)
    return EXIT_OK


def cmd_elliptic_check(args: argparse.Namespace) -> int:
    _validate_numeric_flags(args)
    report = workflow.elliptic_check(_options(args))
    return _finish(report, args)


COMMANDS = {
    "derive": cmd_derive,
    "verify": cmd_verify,
    "catalog": cmd_catalog,
    "elliptic-check": cmd_elliptic_check,
}


def _log_level(verbose: int) -> int:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return getattr(logging, settings.log_level.upper(), logging.WARNING)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help / --version
        return int(e.code or 0)

    logging.basicConfig(
        level=_log_level(args.verbose),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (SpecParseError, CatalogError) as e:
        logger.error(f"Invalid input: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
    except ValidationError as e:
        logger.error(f"Invalid spec file: {e}")
        sys.stderr.write(f"error: invalid spec file\n{e}\n")
        return EXIT_INPUT_ERROR
    except OpenWDVVError as e:
        logger.error(f"Command {args.command} failed: {e}", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
