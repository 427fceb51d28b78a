import logging
import sys
from pathlib import Path

from clideps.env_vars.dotenv_utils import (
    check_env_vars,
    load_dotenv_paths,
    update_env_file,
)
from clideps.ui.inputs import input_confirm, input_simple_string
from clideps.ui.rich_output import (
    format_failure,
    format_success,
    print_heading,
)
from dotenv import load_dotenv
from prettyfmt import fmt_lines, fmt_path
from rich import print as rprint
from rich.console import Console
from rich.logging import RichHandler

from morseig.config.morseig_env import Env, get_options

ENV_VARS = [e.value for e in Env]


class CancelSetup(RuntimeError):
    pass


def _cli_name() -> str:
    """The actual CLI command name."""
    return Path(sys.argv[0]).stem


def _env_config_path() -> Path:
    return Path.home() / ".config" / "morseig" / "env"


def _validate_int(text: str) -> bool | str:
    text = text.strip()
    if not text:
        return False
    if not text.isdigit():
        return "Enter a non-negative integer."
    return True


def read_env_vars(verbose: bool = False) -> dict[str, str]:
    env_vars = check_env_vars(*ENV_VARS)
    if verbose:
        if env_vars:
            rprint(format_success("Found environment variables:"))
            rprint(fmt_lines([f"{k} = {v!r}" for k, v in env_vars.items()]))
        else:
            rprint(format_success("No morseig environment variables set, using defaults."))
        rprint()
    return env_vars


def load_env(verbose: bool = False) -> dict[str, str]:
    """
    Load the standard config env path, then any .env files. Variables already set in the
    environment take precedence.
    """
    load_dotenv(_env_config_path())
    load_dotenv_paths()
    return read_env_vars(verbose=verbose)


def setup_logging(level: str) -> None:
    """
    Rich console logging, on stderr.
    """
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False, markup=True)],
        force=True,
    )


def show_setup() -> bool:
    rprint()
    if _env_config_path().exists():
        rprint(format_success(f"Found config file at {fmt_path(_env_config_path())}"))
    else:
        rprint(format_failure(f"No config file at {fmt_path(_env_config_path())}"))

    load_env(verbose=True)
    try:
        rprint(f"Analysis options: {get_options()}")
    except ValueError as e:
        rprint(format_failure(f"Invalid environment settings: {e}"))
        return False
    rprint()
    return True


def interactive_setup() -> None:
    try:
        print_heading("Configuring morseig defaults")

        show_setup()
        rprint("[bright_black](Hit Ctrl-C to cancel.)[/bright_black]")
        rprint()

        if not input_confirm(
            "Save new defaults for the worker count and random seed?", default=True
        ):
            raise CancelSetup

        workers = input_simple_string("Worker threads: ", validate=_validate_int)
        seed = input_simple_string("Random seed: ", validate=_validate_int)
        if not workers or not seed:
            raise CancelSetup

        update_env_file(
            _env_config_path(),
            {Env.MORSEIG_WORKERS.value: workers.strip(), Env.MORSEIG_SEED.value: seed.strip()},
            create_if_missing=True,
        )
        rprint()
        rprint(format_success(f"Settings saved to: {fmt_path(_env_config_path())}"))
        rprint()
        rprint(f"Run `[bold cyan]{_cli_name()} --help[/bold cyan]` for the list of commands.")
        rprint()

        load_dotenv(_env_config_path(), override=True)

    except CancelSetup:
        rprint()
        rprint("[yellow]Cancelling.[/yellow]")
        rprint()
