"""
Boxes in the complex plane and the eigenvalue estimates found in them.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from holofem.base import HolofemDict, InvalidArgument

#: relative enlargement of a box's circumscribed circle
MARGIN = 0.1

#: complex region given as re_min, re_max, im_min, im_max
Region = Tuple[float, float, float, float]


def check_region(region: Sequence[float]) -> Region:
    """Normalize a region to ``(re_min, re_max, im_min, im_max)``.

    Raises:
        InvalidArgument: if the region is malformed or degenerate.
    """
    try:
        re_min, re_max, im_min, im_max = (float(value) for value in region)
    except (TypeError, ValueError):
        raise InvalidArgument(
            "region must be four numbers re_min,re_max,im_min,im_max (got %r)"
            % (region,)
        )
    bounds = (re_min, re_max, im_min, im_max)
    if not all(math.isfinite(value) for value in bounds):
        raise InvalidArgument("region bounds must be finite (got %r)" % (region,))
    if re_max <= re_min or im_max <= im_min:
        raise InvalidArgument("degenerate region %r" % (region,))
    return bounds


def unit_roots(q: int) -> np.ndarray:
    """The ``q``-th roots of unity ``exp(2πij/q)``, ``q`` even, generated so
    that root ``q − j`` is exactly the conjugate of root ``j``."""
    upper = np.exp(2j * np.pi * np.arange(q // 2 + 1) / q)
    upper[0] = 1.0
    upper[-1] = -1.0
    if q % 4 == 0:
        upper[q // 4] = 1j
    return np.concatenate([upper, np.conj(upper[1:-1][::-1])])


class RegionBox:
    """An axis-aligned rectangle in the complex plane with its circumscribed
    contour.

    Args:
        center: Box center.
        half_width: Half the extent along the real axis.
        half_height: Half the extent along the imaginary axis.
        level: Subdivision depth (0 for roots).
        margin: Relative enlargement of the contour radius.

    Raises:
        InvalidArgument: for nonpositive sizes or a contour enclosing 0.
    """

    def __init__(
        self,
        center: complex,
        half_width: float,
        half_height: float,
        level: int = 0,
        margin: float = MARGIN,
    ) -> None:
        if not (half_width > 0 and half_height > 0):
            raise InvalidArgument(
                "box half sizes must be positive (got %r, %r)"
                % (half_width, half_height)
            )
        self.center = complex(center)
        self.half_width = float(half_width)
        self.half_height = float(half_height)
        self.level = level
        self.margin = margin
        #: indicator value once evaluated
        self.indicator: Optional[float] = None
        if abs(self.center) <= self.radius:
            raise InvalidArgument(
                "contour of box at %r (radius %g) encloses the origin"
                % (self.center, self.radius)
            )

    @classmethod
    def from_region(
        cls, region: Sequence[float], level: int = 0, margin: float = MARGIN
    ) -> "RegionBox":
        re_min, re_max, im_min, im_max = check_region(region)
        center = complex(0.5 * (re_min + re_max), 0.5 * (im_min + im_max))
        return cls(
            center, 0.5 * (re_max - re_min), 0.5 * (im_max - im_min), level, margin
        )

    @property
    def radius(self) -> float:
        return math.hypot(self.half_width, self.half_height) * (1 + self.margin)

    @property
    def size(self) -> float:
        "larger half extent"
        return max(self.half_width, self.half_height)

    @property
    def bounds(self) -> Region:
        return (
            self.center.real - self.half_width,
            self.center.real + self.half_width,
            self.center.imag - self.half_height,
            self.center.imag + self.half_height,
        )

    @property
    def sort_key(self) -> Tuple[int, float, float, float]:
        # mirror boxes end up adjacent
        return (
            self.level,
            self.center.real,
            abs(self.center.imag),
            self.center.imag,
        )

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        re_min, re_max, im_min, im_max = self.bounds
        return (
            re_min - slack <= z.real <= re_max + slack
            and im_min - slack <= z.imag <= im_max + slack
        )

    def nodes(self, q: int, radius: Optional[float] = None) -> np.ndarray:
        """Quadrature nodes ``c + r·exp(2πij/q)`` on the contour."""
        r = self.radius if radius is None else radius
        return self.center + r * unit_roots(q)

    def children(self) -> List["RegionBox"]:
        """The four quadrants, lower-left, lower-right, upper-left and
        upper-right."""
        hw, hh = 0.5 * self.half_width, 0.5 * self.half_height
        offsets = (complex(-hw, -hh), complex(hw, -hh), complex(-hw, hh), complex(hw, hh))
        return [
            RegionBox(self.center + offset, hw, hh, self.level + 1, self.margin)
            for offset in offsets
        ]

    def __repr__(self):
        return "RegionBox(center=%r, half_width=%g, half_height=%g, level=%d)" % (
            self.center,
            self.half_width,
            self.half_height,
            self.level,
        )


def tile_region(region: Sequence[float], margin: float = MARGIN) -> List[RegionBox]:
    """Split a region into a row or column of near-square root boxes.

    Raises:
        InvalidArgument: if a root contour would enclose the origin.
    """
    re_min, re_max, im_min, im_max = check_region(region)
    width, height = re_max - re_min, im_max - im_min
    if width >= height:
        cols, rows = math.ceil(width / height - 1e-9), 1
    else:
        cols, rows = 1, math.ceil(height / width - 1e-9)
    box_width, box_height = width / cols, height / rows
    return [
        RegionBox(
            complex(re_min + (i + 0.5) * box_width, im_min + (j + 0.5) * box_height),
            0.5 * box_width,
            0.5 * box_height,
            margin=margin,
        )
        for j in range(rows)
        for i in range(cols)
    ]


class EigenvalueEstimate:
    """A located eigenvalue.

    Args:
        value: The estimate (polished when ``polished`` is true).
        enclosure_radius: Contour radius of the box it was found in.
        indicator_trace: ``(level, indicator)`` for each box on the path.
        polish_residual: Relative pencil residual of the polished value
            (``inf`` when not polished).
        polished: Whether polishing converged.
    """

    def __init__(
        self,
        value: complex,
        enclosure_radius: float,
        indicator_trace: Sequence[Tuple[int, float]] = (),
        polish_residual: float = math.inf,
        polished: bool = False,
    ) -> None:
        self.value = complex(value)
        self.enclosure_radius = enclosure_radius
        self.indicator_trace = list(indicator_trace)
        self.polish_residual = polish_residual
        self.polished = polished

    def as_dict(self) -> HolofemDict:
        return HolofemDict(
            value=[self.value.real, self.value.imag],
            enclosure_radius=self.enclosure_radius,
            indicator_trace=[list(item) for item in self.indicator_trace],
            polish_residual=self.polish_residual,
            polished=self.polished,
        )

    def __repr__(self):
        return "EigenvalueEstimate(value=%r, residual=%.2e, polished=%s)" % (
            self.value,
            self.polish_residual,
            self.polished,
        )
