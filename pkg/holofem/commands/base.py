"""
Base class for command line subcommands.

Each subcommand is a :class:`BaseCommand` subclass in its own module with a
``help`` text, an :meth:`~BaseCommand.add_arguments` hook and a
:meth:`~BaseCommand.handle` method receiving the parsed options as keyword
arguments. Output goes through :attr:`BaseCommand.stdout` so tests can
capture it.
"""

import argparse
import logging
import sys
from typing import Callable, Optional, Sequence, TextIO, Tuple

from holofem.base import HolofemException, ImproperConfiguration
from holofem.config import load_config, parse_bool
from holofem.sim.search import DEFAULT_OPTIONS

logger = logging.getLogger(__name__)

#: logging level for each verbosity
LOG_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO}


class CommandError(HolofemException):
    """Raised by commands for invalid input; exits with status 1."""


def float_list(count: Optional[int] = None) -> Callable[[str], Tuple[float, ...]]:
    """Argument type for comma separated numbers, optionally of fixed count."""

    def parse(value: str) -> Tuple[float, ...]:
        try:
            numbers = tuple(float(item) for item in value.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError("expected comma separated numbers: %r" % value)
        if count is not None and len(numbers) != count:
            raise argparse.ArgumentTypeError(
                "expected %d comma separated numbers: %r" % (count, value)
            )
        return numbers

    return parse


def int_list(count: Optional[int] = None) -> Callable[[str], Tuple[int, ...]]:
    """Argument type for comma separated positive integers."""

    def parse(value: str) -> Tuple[int, ...]:
        try:
            numbers = tuple(int(item) for item in value.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError("expected comma separated integers: %r" % value)
        if count is not None and len(numbers) != count:
            raise argparse.ArgumentTypeError(
                "expected %d comma separated integers: %r" % (count, value)
            )
        if any(number < 1 for number in numbers):
            raise argparse.ArgumentTypeError("integers must be positive: %r" % value)
        return numbers

    return parse


class CommandParser(argparse.ArgumentParser):
    """Argument parser that raises :class:`CommandError` instead of exiting."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CommandError("%s: %s" % (self.prog, message))


class BaseCommand:
    """A subcommand of the ``holofem`` program."""

    #: command name on the command line
    name = None

    help = ""

    #: normal verbosity level
    v_normal = 1
    verbosity = v_normal

    def __init__(self, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Add command specific arguments."""

    def handle(self, **options) -> None:
        raise NotImplementedError

    def add_search_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Arguments shared by every command that runs a search."""
        parser.add_argument(
            "--quad-points",
            type=int,
            help="Quadrature nodes per contour (default %d)" % DEFAULT_OPTIONS.quad_points,
        )
        parser.add_argument(
            "--threshold",
            type=float,
            help="Indicator threshold (default %g)" % DEFAULT_OPTIONS.threshold,
        )
        parser.add_argument(
            "--tol",
            type=float,
            help="Box size tolerance (default %g times the region diameter)"
            % DEFAULT_OPTIONS.relative_tolerance,
        )
        parser.add_argument(
            "--seed", type=int, help="Random seed (default %d)" % DEFAULT_OPTIONS.seed
        )
        parser.add_argument(
            "--workers",
            type=int,
            help="Threads evaluating boxes of one level (default 1)",
        )

    @staticmethod
    def search_options(options: dict) -> dict:
        """Search option overrides from parsed command line options."""
        return {
            "quad_points": options.get("quad_points"),
            "threshold": options.get("threshold"),
            "tolerance": options.get("tol"),
            "seed": options.get("seed"),
            "workers": options.get("workers"),
        }

    def create_parser(self, prog: str) -> CommandParser:
        parser = CommandParser(
            prog="%s %s" % (prog, self.name),
            description=self.help,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        parser.add_argument(
            "-v",
            "--verbosity",
            type=int,
            default=self.v_normal,
            help="0 for errors only, 1 for warnings (default), 2 for progress "
            "details, 3 for debugging",
        )
        parser.add_argument("--config", help="Read defaults from a key=value file")
        parser.add_argument("--out", help="Write output to this file instead of stdout")
        self.add_arguments(parser)
        return parser

    def apply_config(self, parser: argparse.ArgumentParser, path: str) -> None:
        """Use the values of a configuration file as parser defaults,
        converted with each argument's own type."""
        actions = {action.dest: action for action in parser._actions}
        defaults = {}
        for key, value in load_config(path).items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                raise ImproperConfiguration("%s: unknown setting %r" % (path, key))
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                defaults[key] = parse_bool(value)
                continue
            try:
                defaults[key] = action.type(value) if action.type else value
            except (TypeError, ValueError, argparse.ArgumentTypeError) as err:
                raise ImproperConfiguration("%s: bad value for %s: %s" % (path, key, err))
            if action.choices and defaults[key] not in action.choices:
                raise ImproperConfiguration(
                    "%s: %s must be one of %s" % (path, key, ", ".join(action.choices))
                )
        parser.set_defaults(**defaults)

    def run_from_argv(self, prog: str, argv: Sequence[str]) -> None:
        """Parse arguments (with an optional config file) and run
        :meth:`handle`, writing to ``--out`` when given."""
        parser = self.create_parser(prog)
        options, _ = parser.parse_known_args(argv)
        if options.config:
            self.apply_config(parser, options.config)
        options = vars(parser.parse_args(argv))
        self.verbosity = options["verbosity"]
        logging.basicConfig(
            level=LOG_LEVELS.get(self.verbosity, logging.DEBUG),
            stream=self.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        out = options.get("out")
        if not out:
            self.handle(**options)
            return
        stdout = self.stdout
        with open(out, "w") as outfile:
            self.stdout = outfile
            try:
                self.handle(**options)
            finally:
                self.stdout = stdout
        logger.info("Wrote %s output to %s", self.name, out)
