"""
**study** follows one exact eigenvalue of a rectangle through a sequence of
structured meshes and prints the discrete value, its error and the observed
convergence order for each mesh.

A progress bar is displayed on stderr unless suppressed.

Example usage::

    # smallest eigenvalue of the unit square, Markdown table
    holofem study --nx 10,20,40,80 --target 1,1 --format md
    # CSV at full precision, written to a file
    holofem study --nx 10,20,40 --out study.csv --no-progress
    # the (2,1) eigenvalue of a 2x1 rectangle
    holofem study --rect 0,0,2,1 --target 2,1
    # both diagonals in every cell
    holofem study --nx 10,20,40 --pattern crisscross

"""

from holofem import study
from holofem.commands.base import BaseCommand, float_list, int_list
from holofem.mesh import PATTERNS, UNIT_SQUARE


class Command(BaseCommand):
    """Run a convergence study"""

    name = "study"
    help = __doc__

    def add_arguments(self, parser):
        parser.add_argument(
            "--nx",
            type=int_list(),
            default=(10, 20, 40, 80),
            help="Comma separated cells per side, each a doubling of the last",
        )
        parser.add_argument(
            "--rect",
            type=float_list(4),
            default=UNIT_SQUARE,
            help="Rectangle x0,y0,x1,y1 (default unit square)",
        )
        parser.add_argument(
            "--pattern",
            choices=PATTERNS,
            default="diagonal",
            help="Cell splitting of the meshes (default diagonal)",
        )
        parser.add_argument(
            "--target",
            type=int_list(2),
            default=(1, 1),
            help="Index pair m,n of the exact eigenvalue (default 1,1)",
        )
        parser.add_argument(
            "--format",
            choices=study.FORMATS,
            default="csv",
            help="Output format (default csv)",
        )
        parser.add_argument(
            "--no-progress",
            action="store_true",
            help="Do not display a progress bar",
        )
        self.add_search_arguments(parser)

    def handle(self, **options):
        records = study.convergence_study(
            options["rect"],
            options["nx"],
            options["target"],
            self.search_options(options),
            progress=not options["no_progress"] and self.verbosity >= self.v_normal,
            pattern=options["pattern"],
        )
        self.stdout.write(study.format_records(records, options["format"]))
