"""
**indicator-map** evaluates the spectral indicator on a grid of cells over
a region and writes CSV rows ``re,im,indicator`` for plotting elsewhere.
Cells whose contour would enclose the origin are written as ``nan``.

Example usage::

    holofem indicator-map --nx 10 --region 10,60,-2,2 --grid 50,4 --out map.csv

"""

from holofem.assembly import assemble
from holofem.commands.base import BaseCommand, CommandError, float_list, int_list
from holofem.commands.solve import add_mesh_arguments, load_mesh
from holofem.opfun import OperatorFunction
from holofem.sim.maps import indicator_map, write_indicator_map


class Command(BaseCommand):
    """Dump indicator values on a grid"""

    name = "indicator-map"
    help = __doc__

    def add_arguments(self, parser):
        add_mesh_arguments(parser)
        parser.add_argument(
            "--region",
            type=float_list(4),
            help="Region re_min,re_max,im_min,im_max",
        )
        parser.add_argument(
            "--grid",
            type=int_list(2),
            default=(20, 10),
            help="Cells along the real and imaginary axes (default 20,10)",
        )
        self.add_search_arguments(parser)

    def handle(self, **options):
        if not options.get("region"):
            raise CommandError("--region is required")
        opfun = OperatorFunction(assemble(load_mesh(options)))
        search_options = self.search_options(options)
        # box tolerance has no meaning for a fixed grid
        search_options.pop("tolerance")
        points = indicator_map(
            opfun, options["region"], tuple(options["grid"]), search_options
        )
        write_indicator_map(points, self.stdout)
