import math

import numpy as np
import pytest

from holofem.base import InvalidArgument
from holofem.sim.boxes import (
    EigenvalueEstimate,
    RegionBox,
    check_region,
    tile_region,
    unit_roots,
)


@pytest.mark.parametrize(
    "region",
    [(1, 2, 0), (2, 1, 0, 1), (1, 2, 1, 1), (1, 2, 0, math.nan), "abcd"],
)
def test_check_region_invalid(region):
    with pytest.raises(InvalidArgument):
        check_region(region)


def test_check_region():
    assert check_region(["1", 2, -0.5, 0.5]) == (1.0, 2.0, -0.5, 0.5)


@pytest.mark.parametrize("q", [8, 16, 32, 64, 10])
def test_unit_roots(q):
    roots = unit_roots(q)
    assert roots.shape == (q,)
    assert roots[0] == 1
    assert roots[q // 2] == -1
    assert np.allclose(np.abs(roots), 1)
    assert np.allclose(roots, np.exp(2j * np.pi * np.arange(q) / q))
    # conjugate pairs are exact, so mirrored contours hit the same shifts
    for j in range(1, q):
        assert roots[q - j] == np.conj(roots[j])


class TestRegionBox:
    def test_from_region(self):
        box = RegionBox.from_region((10, 14, -1, 1))
        assert box.center == 12
        assert (box.half_width, box.half_height) == (2, 1)
        assert box.radius == pytest.approx(math.sqrt(5) * 1.1)
        assert box.size == 2
        assert box.bounds == (10, 14, -1, 1)

    def test_encloses_origin(self):
        with pytest.raises(InvalidArgument):
            RegionBox.from_region((-1, 3, -1, 1))
        with pytest.raises(InvalidArgument):
            RegionBox(2 + 0j, 1.5, 1.5)

    def test_nonpositive_size(self):
        with pytest.raises(InvalidArgument):
            RegionBox(10, 0, 1)

    def test_children_tile_parent(self):
        box = RegionBox(20 + 2j, 4, 2, level=3)
        children = box.children()
        assert [child.level for child in children] == [4] * 4
        assert sum(child.half_width * child.half_height for child in children) == pytest.approx(
            box.half_width * box.half_height
        )
        lows = sorted((child.bounds[0], child.bounds[2]) for child in children)
        assert lows == [(16, 0), (16, 2), (20, 0), (20, 2)]
        for child in children:
            assert box.contains(child.center)

    def test_contains(self):
        box = RegionBox(20, 1, 1)
        assert box.contains(21 + 1j)
        assert not box.contains(21.1)
        assert box.contains(21.1, slack=0.2)

    def test_nodes(self):
        box = RegionBox(20 + 5j, 1, 1)
        nodes = box.nodes(16)
        assert np.allclose(np.abs(nodes - box.center), box.radius)
        assert nodes[0] == box.center + box.radius
        assert np.allclose(box.nodes(16, radius=3.0) - box.center, 3 * unit_roots(16))

    def test_mirror_boxes_sort_together(self):
        boxes = [RegionBox(c, 0.5, 0.5) for c in (21 + 1j, 20 - 1j, 21 - 1j, 20 + 1j)]
        boxes.sort(key=lambda b: b.sort_key)
        assert [b.center for b in boxes] == [20 - 1j, 20 + 1j, 21 - 1j, 21 + 1j]

    def test_repr(self):
        assert repr(RegionBox(20, 1, 0.5, level=2)) == (
            "RegionBox(center=(20+0j), half_width=1, half_height=0.5, level=2)"
        )


class TestTileRegion:
    def test_wide(self):
        boxes = tile_region((10, 20, -1, 1))
        assert len(boxes) == 5
        assert all(box.half_width == pytest.approx(1) for box in boxes)
        assert [box.center.real for box in boxes] == pytest.approx([11, 13, 15, 17, 19])

    def test_tall(self):
        boxes = tile_region((10, 11, 0, 3))
        assert len(boxes) == 3
        assert [box.center.imag for box in boxes] == pytest.approx([0.5, 1.5, 2.5])

    def test_uneven(self):
        boxes = tile_region((10, 13.5, 0, 1))
        assert len(boxes) == 4
        assert boxes[-1].bounds[1] == pytest.approx(13.5)
        assert all(box.half_height == 0.5 for box in boxes)

    def test_square(self):
        boxes = tile_region((10, 12, -1, 1))
        assert len(boxes) == 1
        assert boxes[0].center == 11


def test_estimate_as_dict():
    estimate = EigenvalueEstimate(19.75 + 0j, 1e-5, [(0, 2.5), (1, 2.4)], 1e-13, True)
    assert estimate.as_dict().as_dict() == {
        "value": [19.75, 0.0],
        "enclosure_radius": 1e-5,
        "indicator_trace": [[0, 2.5], [1, 2.4]],
        "polish_residual": 1e-13,
        "polished": True,
    }
    assert "polished=True" in repr(estimate)
    assert EigenvalueEstimate(3, 1).polish_residual == math.inf
