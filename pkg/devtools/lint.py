import argparse
import subprocess

from funlog import log_calls
from rich import get_console, reconfigure
from rich import print as rprint

SRC_PATHS = ["src", "tests", "devtools"]
DOC_PATHS = ["README.md", "development.md", "DESIGN.md"]


reconfigure(emoji=not get_console().options.legacy_windows)  # No emojis on legacy windows.


def main() -> int:
    parser = argparse.ArgumentParser(description="Spell check, lint, format and type check.")
    parser.add_argument(
        "--check", action="store_true", help="report problems only, without rewriting files"
    )
    parser.add_argument("--no-types", action="store_true", help="skip basedpyright")
    args = parser.parse_args()

    rprint()

    codespell = ["codespell", *SRC_PATHS, *DOC_PATHS]
    ruff_check = ["ruff", "check", *SRC_PATHS]
    ruff_format = ["ruff", "format", *SRC_PATHS]
    if args.check:
        ruff_format.insert(2, "--check")
    else:
        codespell.insert(1, "--write-changes")
        ruff_check.insert(2, "--fix")

    errcount = run(codespell) + run(ruff_check) + run(ruff_format)
    if not args.no_types:
        errcount += run(["basedpyright", "--stats", *SRC_PATHS])

    rprint()

    if errcount != 0:
        rprint(f"[bold red]:x: Lint failed: {errcount} of the checks reported errors.[/bold red]")
    else:
        rprint("[bold green]:white_check_mark: Lint passed![/bold green]")
    rprint()

    return errcount


@log_calls(level="warning", show_timing_only=True)
def run(cmd: list[str]) -> int:
    rprint()
    rprint(f"[bold green]>> {' '.join(cmd)}[/bold green]")
    try:
        subprocess.run(cmd, text=True, check=True)
    except KeyboardInterrupt:
        rprint("[yellow]Keyboard interrupt - Cancelled[/yellow]")
        return 1
    except subprocess.CalledProcessError as e:
        rprint(f"[bold red]Error: {e}[/bold red]")
        return 1
    return 0


if __name__ == "__main__":
    exit(main())
