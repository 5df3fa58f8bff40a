import io
import math

import pytest

from holofem.base import InvalidArgument
from holofem.sim.maps import MapPoint, indicator_map, write_indicator_map


def test_indicator_map_peaks_at_eigenvalue(unit_square):
    points = indicator_map(unit_square(2).opfun, (20, 44, -2, 2), shape=(6, 1))
    assert [point.re for point in points] == pytest.approx([22, 26, 30, 34, 38, 42])
    assert all(point.im == 0 for point in points)
    # only the cells whose circles enclose 32 light up
    high = [point.re for point in points if point.indicator > 1e-3]
    assert high == pytest.approx([30, 34])


def test_indicator_map_row_order(unit_square):
    points = indicator_map(unit_square(2).opfun, (20, 24, -1, 1), shape=(2, 2))
    assert [(point.re, point.im) for point in points] == [
        (21, -0.5),
        (23, -0.5),
        (21, 0.5),
        (23, 0.5),
    ]


def test_cells_around_origin_are_nan(unit_square):
    points = indicator_map(unit_square(2).opfun, (-2, 6, -1, 1), shape=(4, 1))
    assert math.isnan(points[0].indicator)
    assert math.isnan(points[1].indicator)
    assert math.isfinite(points[3].indicator)


def test_invalid_shape(unit_square):
    with pytest.raises(InvalidArgument):
        indicator_map(unit_square(2).opfun, (20, 24, -1, 1), shape=(0, 3))


def test_write_indicator_map():
    out = io.StringIO()
    write_indicator_map([MapPoint(21.0, -0.5, 1e-12), MapPoint(23.0, 0.5, math.nan)], out)
    assert out.getvalue() == "re,im,indicator\n21.0,-0.5,1e-12\n23.0,0.5,nan\n"
