"""
**oracle** prints every eigenvalue of a small mesh, ascending, computed with
the dense Jacobi solver (or LAPACK for comparison).

Example usage::

    holofem oracle --nx 4
    holofem oracle --nx 8 --method lapack

"""

from holofem.assembly import assemble
from holofem.commands.base import BaseCommand
from holofem.commands.solve import add_mesh_arguments, load_mesh
from holofem.linalg.oracle import dense_generalized_eig


class Command(BaseCommand):
    """Dense reference spectrum"""

    name = "oracle"
    help = __doc__

    def add_arguments(self, parser):
        add_mesh_arguments(parser)
        parser.add_argument(
            "--method",
            choices=["jacobi", "lapack"],
            default="jacobi",
            help="Dense eigensolver (default jacobi)",
        )

    def handle(self, **options):
        system = assemble(load_mesh(options))
        values = dense_generalized_eig(system.A, system.M, method=options["method"])
        for value in values:
            self.stdout.write("%.12f\n" % value)
