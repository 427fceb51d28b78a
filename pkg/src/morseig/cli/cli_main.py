"""
The `morseig` (or `mig`) command finds and classifies the critical points of ordered
eigenvalues of matrix families, including the non-smooth ones at eigenvalue crossings,
and checks the Morse inequalities they satisfy.

Families are builtins (`real2band-t2`, `weyl-t3`, `nodal-ring-t3`, ...) or JSON
trigonometric polynomial specs.
"""

import argparse
import logging
import sys
from importlib.metadata import version
from pathlib import Path
from textwrap import dedent
from typing import Literal

from clideps.utils.readable_argparse import ReadableColorFormatter, get_readable_console_width
from rich import get_console
from rich import print as rprint

from morseig.cli.cli_commands import (
    EXIT_ERROR,
    classify,
    contour,
    help,
    hf_check,
    scan,
    setup,
    table,
    trace,
    vanhove,
)

APP_NAME = "morseig"

DESCRIPTION = """morseig: Morse theory for eigenvalue branches of matrix families"""

ALL_COMMANDS = [help, setup, table, classify, scan, vanhove, hf_check, trace, contour]

ANALYSIS_COMMANDS = [classify, scan, vanhove, hf_check, trace, contour]

FAMILY_COMMANDS = [classify, scan, vanhove, trace, contour]

log = logging.getLogger(__name__)


def get_version_name() -> str:
    try:
        return f"{APP_NAME} v{version(APP_NAME)}"
    except Exception:
        return "(unknown version)"


def add_general_flags(parser: argparse.ArgumentParser) -> None:
    """
    These are flags that should work anywhere (main parser and subparsers).
    """
    parser.add_argument(
        "--debug", action="store_true", help="enable debug logging (log level: debug)"
    )
    parser.add_argument(
        "--verbose", action="store_true", help="enable verbose logging (log level: info)"
    )
    parser.add_argument("--quiet", action="store_true", help="only log errors (log level: error)")


def add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    """
    Tolerances and run settings. Unset flags fall back to `MORSEIG_*` environment variables,
    then to built-in defaults.
    """
    parser.add_argument("--tol-def", type=float, help="definiteness margin (default 1e-7)")
    parser.add_argument(
        "--tol-hess", type=float, help="relative Hessian zero threshold (default 1e-6)"
    )
    parser.add_argument(
        "--tol-cluster", type=float, help="relative eigenvalue grouping gap (default 1e-6)"
    )
    parser.add_argument(
        "--tol-res", type=float, help="relative stratum residual tolerance (default 1e-10)"
    )
    parser.add_argument("--seed", type=int, help="seed for randomized searches (default 0)")
    parser.add_argument(
        "--workers", type=int, help="worker threads (default: CPU count, at most 8)"
    )
    parser.add_argument("--out", type=Path, help="write the result to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        formatter_class=ReadableColorFormatter,
        epilog=dedent((__doc__ or "") + "\n\n" + get_version_name()),
        description=DESCRIPTION,
    )
    parser.add_argument("--version", action="store_true", help="show version and exit")
    add_general_flags(parser)

    subparsers = parser.add_subparsers(dest="subcommand", required=False)

    for func in ALL_COMMANDS:
        name = func.__name__
        subparser = subparsers.add_parser(
            name,
            aliases=[name.replace("_", "-")] if "_" in name else [],
            help=func.__doc__,
            description=func.__doc__,
            formatter_class=ReadableColorFormatter,
        )
        add_general_flags(subparser)

        if func in ANALYSIS_COMMANDS:
            add_analysis_flags(subparser)

        if func in FAMILY_COMMANDS:
            subparser.add_argument(
                "--family",
                type=str,
                required=True,
                help="builtin family name or path to a JSON family spec",
            )
            subparser.add_argument(
                "--k", type=int, default=1, help="eigenvalue branch, 1 = lowest (default: 1)"
            )

        if func in {classify, trace}:
            subparser.add_argument(
                "--point",
                type=str,
                required=True,
                help="comma-separated parameter values, e.g. `0,0`",
            )

        if func in {scan, vanhove, contour}:
            subparser.add_argument(
                "--grid", type=int, default=32, help="grid points per dimension (default: 32)"
            )

        if func in {scan, vanhove}:
            subparser.add_argument(
                "--manifold-poincare",
                type=str,
                help="Poincare polynomial of the parameter manifold, e.g. `1+2t+t^2` or `1,2,1` "
                "(default: the torus)",
            )

        if func in {scan}:
            subparser.add_argument(
                "--format", choices=["json", "md", "csv"], default="json", help="output format"
            )

        if func in {trace}:
            subparser.add_argument(
                "--step", type=float, default=0.05, help="predictor step (default: 0.05)"
            )
            subparser.add_argument(
                "--max-steps", type=int, default=2000, help="step limit (default: 2000)"
            )
            subparser.add_argument(
                "--format",
                choices=["csv", "json"],
                default="csv",
                help="polyline CSV or JSON summary",
            )

        if func in {table}:
            subparser.add_argument(
                "--nu",
                "--max-nu",
                dest="nu",
                type=int,
                default=8,
                help="largest multiplicity (default: 8)",
            )
            subparser.add_argument(
                "--field", choices=["real", "complex"], default="real", help="scalar field"
            )
            subparser.add_argument(
                "--format", choices=["md", "csv"], default="md", help="output format"
            )
            subparser.add_argument("--out", type=Path, help="write the table to this path")

        if func in {hf_check}:
            subparser.add_argument(
                "--trials", type=int, default=200, help="random families (default: 200)"
            )

        if func in {vanhove, hf_check}:
            subparser.add_argument(
                "--format", choices=["json", "text"], default="json", help="output format"
            )

        if func in {setup}:
            subparser.add_argument(
                "--show",
                action="store_true",
                help="show the current config and environment variables",
            )

    return parser


def get_log_level(args: argparse.Namespace) -> Literal["debug", "info", "warning", "error"]:
    if args.quiet:
        return "error"
    elif args.verbose:
        return "info"
    elif args.debug:
        return "debug"
    else:
        return "warning"


def run_analysis_command(subcommand: str, args: argparse.Namespace) -> int:
    # Lazy imports, to keep --help fast.
    from pydantic import ValidationError

    from morseig.cli.cli_setup import load_env
    from morseig.config.morseig_env import get_options
    from morseig.errors import MorseigError

    try:
        load_env()
        opts = get_options(
            tol_def=args.tol_def,
            tol_hess=args.tol_hess,
            tol_cluster=args.tol_cluster,
            tol_res=args.tol_res,
            seed=args.seed,
            workers=args.workers,
        )
        log.info("Analysis options: %s", opts)
        log.info("Running subcommand: %s", subcommand)

        if subcommand == classify.__name__:
            return classify(args.family, args.point, args.k, opts, out=args.out)
        elif subcommand == scan.__name__:
            return scan(
                args.family,
                args.k,
                args.grid,
                opts,
                format=args.format,
                out=args.out,
                manifold_poincare=args.manifold_poincare,
            )
        elif subcommand == vanhove.__name__:
            return vanhove(
                args.family,
                args.grid,
                opts,
                format=args.format,
                out=args.out,
                manifold_poincare=args.manifold_poincare,
            )
        elif subcommand == hf_check.__name__:
            return hf_check(args.trials, opts, format=args.format, out=args.out)
        elif subcommand == trace.__name__:
            return trace(
                args.family,
                args.point,
                args.k,
                args.step,
                args.max_steps,
                opts,
                format=args.format,
                out=args.out,
            )
        elif subcommand == contour.__name__:
            return contour(args.family, args.k, args.grid, out=args.out)
        else:
            raise ValueError(f"Unknown subcommand: {args.subcommand}")

    except KeyboardInterrupt:
        rprint()
        log.warning("[yellow]Cancelled[/yellow]")
        rprint()
        return 130
    except (MorseigError, ValueError, KeyError, FileNotFoundError, ValidationError) as e:
        rprint()
        log.error("Error running %s: %s: %s", subcommand, e.__class__.__name__, e)
        log.info("Error details", exc_info=e)
        return EXIT_ERROR


def main() -> None:
    get_console().width = get_readable_console_width()
    parser = build_parser()
    args = parser.parse_args()

    # Handle lazily to keep --help fast.
    if args.version:
        rprint(get_version_name())
        return

    # Handle case where no subcommand is provided
    if not args.subcommand:
        parser.print_help()
        return

    from morseig.cli.cli_setup import setup_logging

    setup_logging(get_log_level(args))

    # As a convenience also allow dashes in the subcommand name.
    subcommand = args.subcommand.replace("-", "_")

    if subcommand == setup.__name__:
        setup(show=args.show)
        return
    elif subcommand == help.__name__:
        help()
        return
    elif subcommand == table.__name__:
        try:
            sys.exit(table(args.nu, args.field, args.format, args.out))
        except ValueError as e:
            log.error("Error running table: %s", e)
            sys.exit(EXIT_ERROR)

    sys.exit(run_analysis_command(subcommand, args))


if __name__ == "__main__":
    main()
