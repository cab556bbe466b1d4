import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from defect_entropy.engine import Engine
from defect_entropy.entities.chain import Boundary, DefectKind
from defect_entropy.entities.scan import ScanMode
from defect_entropy.entities.spectra import Filling
from defect_entropy.errors import (
    ConfigError,
    EigenSolverError,
    NumericalValidationError,
    WindowError,
    ZeroModeCountError,
)
from defect_entropy.log import logger
from defect_entropy.settings import Settings
from defect_entropy.validation import InvariantSuite

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def parse_defect(value: str) -> dict:
    """`cell:kind`, e.g. `50:one_site`; the kind defaults to one_site."""
    cell, _, kind = value.partition(":")
    try:
        return {"cell": int(cell), "kind": DefectKind(kind or DefectKind.ONE_SITE)}
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Invalid defect '{value}': {e}") from e


def _add_scan_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON scan configuration; flags override its keys")
    parser.add_argument("--n-sites", type=int, help="Number of sites N = 2L")
    parser.add_argument("--delta", type=float, help="Dimerization parameter")
    parser.add_argument("--hopping", type=float, help="Hopping amplitude t")
    parser.add_argument("--boundary", choices=[b.value for b in Boundary])
    parser.add_argument(
        "--defect",
        type=parse_defect,
        action="append",
        help="Defect as cell:kind (one_site or three_site); repeat for several",
    )
    parser.add_argument("--no-defects", action="store_true", help="Defect-free chain")
    parser.add_argument("--window-length", type=int, help="Interval length in cells")
    parser.add_argument("--m-start", type=int, help="First window start cell")
    parser.add_argument("--m-stop", type=int, help="Last window start cell")
    parser.add_argument("--n", type=float, action="append", help="Renyi index; repeat for several")
    parser.add_argument("--p", type=float, action="append", help="Zero-mode hybridization; repeat for several")
    parser.add_argument("--filling", choices=[f.value for f in Filling])
    parser.add_argument("--tolerance", type=float, help="Lattice/asymptotic deviation allowed in bulk windows")
    parser.add_argument("--csv", type=Path, help="CSV output path")
    parser.add_argument("--json", type=Path, help="JSON metadata output path")
    parser.add_argument("--threads", type=int, help="Worker threads for window scans")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="defect-entropy",
        description="Charge-resolved entanglement entropies of SSH chains with topological defects.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan-interval", help="Slide a window along the chain")
    scan.add_argument(
        "--mode",
        choices=[ScanMode.LATTICE.value, ScanMode.ASYMPTOTIC.value, ScanMode.BOTH.value],
        default=ScanMode.LATTICE.value,
    )
    zero_mode = sub.add_parser("zero-mode-scan", help="Scan windows for each zero-mode hybridization p")
    zero_mode.add_argument(
        "--mode",
        choices=[ScanMode.LATTICE.value, ScanMode.ASYMPTOTIC.value, ScanMode.BOTH.value],
        default=ScanMode.LATTICE.value,
    )
    dimerized = sub.add_parser("dimerized", help="Exact delta = 1 tables")
    statmech = sub.add_parser("statmech", help="Chemical-potential analysis of interval spectra")
    aklt = sub.add_parser("aklt", help="Spin-resolved entropies of the AKLT/product junction")
    for command in (scan, zero_mode, dimerized, statmech, aklt):
        _add_scan_arguments(command)

    sub.add_parser("selftest", help="Run the invariant suite")
    return parser


def _overrides(args: argparse.Namespace, mode: ScanMode) -> dict:
    chain = {
        key: value
        for key, value in {
            "n_sites": args.n_sites,
            "delta": args.delta,
            "t": args.hopping,
            "boundary": args.boundary,
        }.items()
        if value is not None
    }
    if args.no_defects:
        chain["defects"] = []
    elif args.defect:
        chain["defects"] = args.defect

    overrides: dict = {"mode": mode}
    if chain:
        overrides["chain"] = chain
    if args.window_length is not None:
        overrides["window_length"] = args.window_length
    if args.m_start is not None or args.m_stop is not None:
        if args.m_start is None or args.m_stop is None:
            raise ConfigError("--m-start and --m-stop must be given together")
        overrides["m_range"] = (args.m_start, args.m_stop)
    if args.n:
        overrides["n_list"] = args.n
    if args.p:
        overrides["p_list"] = args.p
    if args.filling is not None:
        overrides["filling"] = args.filling
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    if args.csv is not None:
        overrides["outputs"] = {"csv_path": args.csv, "json_path": args.json}
    elif args.json is not None:
        raise ConfigError("--json needs --csv")
    return overrides


def _mode(args: argparse.Namespace) -> ScanMode:
    match args.command:
        case "scan-interval" | "zero-mode-scan":
            return ScanMode(args.mode)
        case "dimerized":
            return ScanMode.DIMERIZED
        case "statmech":
            return ScanMode.STATMECH
        case "aklt":
            return ScanMode.AKLT


def run_scan(args: argparse.Namespace, settings: Settings) -> int:
    engine = Engine(settings)
    overrides = _overrides(args, _mode(args))
    if args.command == "zero-mode-scan":
        overrides["filling"] = Filling.HALF
    config = engine.storage_handler.load_config(args.config, overrides)
    if args.command == "zero-mode-scan" and not config.p_list:
        raise ConfigError("zero-mode-scan needs at least one p, from --p or p_list in --config")
    engine.run(config, stem=args.command)
    return EXIT_OK


def run_selftest(settings: Settings) -> int:
    results = InvariantSuite(settings).run()
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise NumericalValidationError(f"Selftest checks failed: {', '.join(failed)}")
    logger.info(f"cli. All {len(results)} selftest checks passed")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    overrides = {"threads": args.threads} if getattr(args, "threads", None) else {}
    try:
        settings = Settings(**overrides)
        logger.setLevel(logging.DEBUG if args.verbose else settings.log_level.upper())
        if args.command == "selftest":
            return run_selftest(settings)
        return run_scan(args, settings)
    except (ValidationError, ConfigError, WindowError, ValueError, OSError) as e:
        logger.error(f"cli. Invalid configuration: {e}")
        return EXIT_CONFIG
    except (NumericalValidationError, EigenSolverError, ZeroModeCountError) as e:
        logger.error(f"cli. Numerical validation failed: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
