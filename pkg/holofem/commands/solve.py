"""
**solve** locates the eigenvalues of one mesh in a region of the complex
plane with the spectral indicator search, and prints one line per
eigenvalue: the polished value and its relative residual.

The mesh is either a structured mesh of a rectangle or a mesh file in the
plain text format. A box that cannot be resolved down to the tolerance is
reported on stderr and the command exits with status 2.

Example usage::

    # eigenvalues of the n=10 unit square mesh between 15 and 55
    holofem solve --nx 10 --region 15,55,-1,1
    # cells split by both diagonals
    holofem solve --nx 10 --region 15,25,-1,1 --pattern crisscross
    # imported mesh, JSON output with indicator traces
    holofem solve --mesh domain.txt --region 5,40,-1,1 --format json
    # also write the stiffness and mass matrices
    holofem solve --nx 4 --region 1,300,-1,1 --dump-matrices matrices/

"""

import json

from holofem.assembly import assemble, dump_system
from holofem.base import UnresolvedClusterError
from holofem.commands.base import BaseCommand, CommandError, float_list
from holofem.mesh import PATTERNS, UNIT_SQUARE, generate_uniform_mesh, read_mesh
from holofem.opfun import OperatorFunction
from holofem.sim.search import search


def add_mesh_arguments(parser):
    """Arguments selecting a structured or imported mesh."""
    parser.add_argument(
        "--nx", type=int, default=10, help="Cells per side of a structured mesh"
    )
    parser.add_argument(
        "--rect",
        type=float_list(4),
        default=UNIT_SQUARE,
        help="Rectangle x0,y0,x1,y1 for a structured mesh (default unit square)",
    )
    parser.add_argument(
        "--pattern",
        choices=PATTERNS,
        default="diagonal",
        help="Cell splitting of a structured mesh (default diagonal)",
    )
    parser.add_argument("--mesh", help="Read the mesh from a file instead")


def load_mesh(options):
    """The mesh requested by :func:`add_mesh_arguments` options."""
    if options.get("mesh"):
        return read_mesh(options["mesh"])
    return generate_uniform_mesh(options["nx"], options["rect"], options["pattern"])


class Command(BaseCommand):
    """Locate eigenvalues in a region"""

    name = "solve"
    help = __doc__

    def add_arguments(self, parser):
        add_mesh_arguments(parser)
        parser.add_argument(
            "--region",
            type=float_list(4),
            help="Search region re_min,re_max,im_min,im_max",
        )
        parser.add_argument(
            "--format",
            choices=["text", "json"],
            default="text",
            help="Output format (default text)",
        )
        parser.add_argument(
            "--dump-matrices",
            metavar="PATH",
            help="Directory to write stiffness.txt and mass.txt into",
        )
        self.add_search_arguments(parser)

    def handle(self, **options):
        if not options.get("region"):
            raise CommandError("--region is required")
        system = assemble(load_mesh(options))
        if options.get("dump_matrices"):
            dump_system(system, options["dump_matrices"])
        result = search(
            OperatorFunction(system), options["region"], self.search_options(options)
        )
        if options["format"] == "json":
            self.stdout.write(json.dumps(result.as_dict(), indent=2) + "\n")
        else:
            for estimate in result:
                self.stdout.write(
                    "%.12f %.3e\n" % (estimate.value.real, estimate.polish_residual)
                )
        if result.warnings:
            for warning in result.warnings:
                self.stderr.write(
                    "unresolved cluster at %r (level %d, indicator %g)\n"
                    % (complex(*warning.center), warning.level, warning.indicator)
                )
            raise UnresolvedClusterError(
                "%d boxes could not be resolved" % len(result.warnings)
            )
