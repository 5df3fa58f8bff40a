"""
Indicator values on a grid of cells, for plotting outside this package.
"""

import csv
import logging
from typing import IO, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from holofem.base import InvalidArgument
from holofem.opfun import OperatorFunction
from holofem.sim.boxes import RegionBox, check_region
from holofem.sim.search import evaluate_box, search_options

logger = logging.getLogger(__name__)


class MapPoint(NamedTuple):
    re: float
    im: float
    indicator: float


def indicator_map(
    opfun: OperatorFunction,
    region: Sequence[float],
    shape: Tuple[int, int] = (20, 10),
    options: Optional[dict] = None,
    **kwargs,
) -> List[MapPoint]:
    """Evaluate the indicator on an ``nx`` by ``ny`` grid of cells covering
    the region, row by row from the bottom.

    Cells whose contour would enclose the origin get ``nan``. Search
    options (``quad_points``, ``seed``, ``margin``, ``nudge``,
    ``max_retries``) apply as in :func:`~holofem.sim.search.search`.
    """
    opts = search_options(options, **kwargs)
    re_min, re_max, im_min, im_max = check_region(region)
    nx, ny = shape
    if nx < 1 or ny < 1:
        raise InvalidArgument("grid shape must be positive (got %r)" % (shape,))
    half_width = 0.5 * (re_max - re_min) / nx
    half_height = 0.5 * (im_max - im_min) / ny
    vector = np.random.default_rng(opts.seed).standard_normal(opfun.n_dof)

    points = []
    for j in range(ny):
        for i in range(nx):
            center = complex(
                re_min + (2 * i + 1) * half_width, im_min + (2 * j + 1) * half_height
            )
            try:
                box = RegionBox(center, half_width, half_height, margin=opts.margin)
            except InvalidArgument:
                value = float("nan")
            else:
                value = evaluate_box(opfun, box, vector, opts)
            points.append(MapPoint(center.real, center.imag, value))
    logger.info("Evaluated indicator map of %d cells", len(points))
    return points


def write_indicator_map(points: Sequence[MapPoint], stream: IO[str]) -> None:
    """Write map points as CSV with header ``re,im,indicator``."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(MapPoint._fields)
    for point in points:
        writer.writerow([repr(float(value)) for value in point])
