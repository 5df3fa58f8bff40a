"""
Spectral indicator method: locate eigenvalues of an operator function in a
region of the complex plane by subdividing boxes.
"""

from holofem.sim.boxes import EigenvalueEstimate, RegionBox, tile_region
from holofem.sim.maps import indicator_map, write_indicator_map
from holofem.sim.search import (
    DEFAULT_OPTIONS,
    Polished,
    SearchResult,
    indicator,
    polish,
    search,
)

__all__ = [
    "DEFAULT_OPTIONS",
    "EigenvalueEstimate",
    "Polished",
    "RegionBox",
    "SearchResult",
    "indicator",
    "indicator_map",
    "polish",
    "search",
    "tile_region",
    "write_indicator_map",
]
