"""Command-line entry point for fracpoisson.

Subcommands are registered by the modules in ``fracpoisson.cli.commands``.
A flat ``key = value`` file given with ``--config`` is merged under the
command-line flags; keys naming settings fields override those settings.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import structlog
from pydantic import ValidationError

from fracpoisson.cli.commands import profiles, rates, ruin, special
from fracpoisson.cli.output import emit
from fracpoisson.config import Settings, configure_logging, initialize_settings
from fracpoisson.errors import FracPoissonError, InputError
from fracpoisson.schemas.run import OutputFormat, RunConfig, Subcommand

logger = structlog.get_logger(__name__)

COMMAND_MODULES = (special, rates, profiles, ruin)

# Namespace entries that are not command parameters
_RUN_KEYS = {"command", "handler", "config", "format", "output", "seed", "n_rep", "workers", "log_level"}
_ALIASES = {"lambda": "lam"}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="run seed (default: settings.default_seed)")
    common.add_argument("--n-rep", type=int, default=10_000, help="Monte Carlo replications")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: FRACPOISSON_WORKERS)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    common.add_argument("--config", default=None, help="flat key = value file merged under the flags")
    common.add_argument("--log-level", default=None, help="override settings.log_level")
    return common


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """Build the top-level parser and return it with the subparsers by name."""
    parser = argparse.ArgumentParser(
        prog="fracpoisson",
        allow_abbrev=False,
        description="Fractional Poisson processes: special functions, laws, rate functions and ruin.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    registered: Dict[str, argparse.ArgumentParser] = {}
    for module in COMMAND_MODULES:
        registered.update(module.register(subparsers, common))
    return parser, registered


def load_config_file(path: str) -> Dict[str, str]:
    """Read a flat ``key = value`` file; blank lines and ``#`` comments are skipped.

    Raises:
        InputError: If the file is missing or a line has no ``=``.
    """
    file = Path(path)
    if not file.is_file():
        raise InputError(f"config file '{path}' not found")
    values: Dict[str, str] = {}
    for number, raw in enumerate(file.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{number}: expected 'key = value', got '{raw}'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(
    subparser: argparse.ArgumentParser, values: Dict[str, str]
) -> Dict[str, str]:
    """Install config-file values as subparser defaults.

    Returns:
        The values that name settings fields instead of flags.
    """
    actions = {action.dest: action for action in subparser._actions}
    defaults: Dict[str, Any] = {}
    settings_values: Dict[str, str] = {}
    for key, value in values.items():
        key = key.removeprefix("settings.")
        dest = _ALIASES.get(key, key)
        if dest in actions:
            action = actions[dest]
            # a value from the file satisfies a required flag
            action.required = False
            if action.nargs == 0:
                defaults[dest] = value.lower() in ("1", "true", "yes", "on")
            else:
                defaults[dest] = value
        elif key in Settings.model_fields:
            settings_values[key] = value
        else:
            raise InputError(f"unknown config key '{key}' for '{subparser.prog}'")
    subparser.set_defaults(**defaults)
    return settings_values


def _parse(argv: List[str]) -> Tuple[argparse.Namespace, Dict[str, str]]:
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)

    parser, registered = build_parser()
    settings_values: Dict[str, str] = {}
    if known.config:
        name = next((token for token in argv if token in registered), None)
        if name is not None:
            settings_values = _apply_config(registered[name], load_config_file(known.config))
    return parser.parse_args(argv), settings_values


def _run_config(args: argparse.Namespace, seed: int, workers: int) -> RunConfig:
    params = {
        ("lambda" if key == "lam" else key): value
        for key, value in sorted(vars(args).items())
        if key not in _RUN_KEYS
    }
    return RunConfig(
        subcommand=Subcommand(args.command),
        params=params,
        seed=seed,
        n_rep=args.n_rep,
        workers=workers,
        output=args.output,
        format=OutputFormat(args.format),
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, dispatch to the subcommand and write its output.

    Returns:
        0 on success, 2 on invalid input, 3 on domain or numerical failure
        and 4 when Monte Carlo replications were insufficient.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    configure_logging()
    try:
        args, settings_values = _parse(argv)
        overrides: Dict[str, Any] = dict(settings_values)
        if args.log_level:
            overrides["log_level"] = args.log_level
        settings = initialize_settings(**overrides)

        seed = settings.default_seed if args.seed is None else args.seed
        workers = args.workers or settings.workers
        config = _run_config(args, seed, workers)
        result = args.handler(args, config)

        if config.output:
            with open(config.output, "w", newline="") as stream:
                emit(stream, config, result)
        else:
            emit(sys.stdout, config, result)
        return 0
    except SystemExit as exc:
        # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else 2
    except ValidationError as exc:
        logger.error("invalid_input", error=str(exc))
        return 2
    except FracPoissonError as exc:
        logger.error("command_failed", error=str(exc), exit_code=exc.exit_code, **exc.diagnostics)
        return exc.exit_code
    except ValueError as exc:
        logger.error("invalid_input", error=str(exc))
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
