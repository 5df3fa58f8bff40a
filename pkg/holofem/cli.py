"""
Command line entry point: ``holofem <command> [options]``.

Commands:

    solve           locate eigenvalues of one mesh in a region
    study           convergence study of one exact eigenvalue
    oracle          dense reference spectrum of a small mesh
    indicator-map   indicator values on a grid of cells
    check           property checks

Run ``holofem <command> --help`` for the options of a command. Exit status
is 0 on success, 1 for invalid input and 2 for numerical failures.
"""

import sys
from typing import Optional, Sequence, TextIO

from holofem.base import HolofemException, NumericalError
from holofem.commands import check, indicator_map, oracle, solve, study

#: command classes by name
COMMANDS = {
    command.name: command
    for command in (
        solve.Command,
        study.Command,
        oracle.Command,
        indicator_map.Command,
        check.Command,
    )
}

PROG = "holofem"


def main(
    argv: Optional[Sequence[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Run a command and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    usage = "usage: %s {%s} [options]\n" % (PROG, ",".join(COMMANDS))

    if not argv or argv[0] in ("-h", "--help"):
        (stdout if argv else stderr).write(usage + __doc__)
        return 0 if argv else 1
    name = argv[0]
    if name not in COMMANDS:
        stderr.write(usage)
        stderr.write("%s: error: unknown command %r\n" % (PROG, name))
        return 1

    command = COMMANDS[name](stdout=stdout, stderr=stderr)
    try:
        command.run_from_argv(PROG, argv[1:])
    except NumericalError as err:
        stderr.write("%s %s: numerical failure: %s\n" % (PROG, name, err))
        return 2
    except (HolofemException, ValueError, OSError) as err:
        stderr.write("%s %s: error: %s\n" % (PROG, name, err))
        return 1
    except SystemExit as err:
        # --help
        return err.code or 0
    return 0
