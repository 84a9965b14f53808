"""
RelationMatch experiment runner - Main file with modular command structure.
"""

import argparse
import inspect
import os
import sys
from typing import Callable, Dict, Optional, Sequence

from dotenv import load_dotenv

from errors import ConfigError, NumericalError
from utils import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, Option, RunUtils, setup_logging

# Load environment variables
load_dotenv()

# Environment variables
OUT_DIR = os.getenv("RELMATCH_OUT_DIR", "runs")
LOG_LEVEL = os.getenv("RELMATCH_LOG_LEVEL", "INFO")
WORKERS = int(os.getenv("RELMATCH_WORKERS", 1))


class CommandRunner:
    """argparse sub-commands registered with a decorator; Option defaults become flags."""

    def __init__(self, prog: str, description: str):
        self.parser = argparse.ArgumentParser(prog=prog, description=description)
        self.subparsers = self.parser.add_subparsers(dest="command", required=True)
        self.handlers: Dict[str, Callable[..., Optional[int]]] = {}

    def command(self, name: str, description: str):
        def decorator(handler):
            sub = self.subparsers.add_parser(name, help=description, description=description)
            for param in inspect.signature(handler).parameters.values():
                option = param.default
                if not isinstance(option, Option):
                    continue
                if param.annotation is bool:
                    sub.add_argument("--" + param.name.replace("_", "-"), dest=param.name,
                                     action="store_true", help=option.description)
                    continue
                kind = param.annotation if param.annotation in (int, float, str) else str
                if option.positional:
                    sub.add_argument(param.name, nargs="?", default=option.default, type=kind,
                                     help=option.description)
                else:
                    sub.add_argument("--" + param.name.replace("_", "-"), dest=param.name,
                                     default=option.default, type=kind, choices=option.choices,
                                     help=option.description)
            self.handlers[name] = handler
            return handler

        return decorator

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        args = vars(self.parser.parse_args(argv))
        handler = self.handlers[args.pop("command")]
        result = handler(**args)
        return EXIT_OK if result is None else result


# Import and register commands
def setup_commands(cli: CommandRunner, utils: RunUtils):
    """Import and setup all command modules."""
    from commands import ablate, compare, goldens, train, verify

    train.setup(cli, utils)
    verify.setup(cli, utils)
    goldens.setup(cli, utils)
    ablate.setup(cli, utils)
    compare.setup(cli, utils)


def main(argv: Optional[Sequence[str]] = None) -> int:
    logger = setup_logging(LOG_LEVEL)
    cli = CommandRunner("relmatch", "Matrix cross-entropy library and RelationMatch experiments.")
    utils = RunUtils(OUT_DIR, WORKERS)
    setup_commands(cli, utils)

    try:
        return cli.run(argv)
    except ConfigError as e:
        logger.error("config: %s", e)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error("numerical failure: %s", e)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
