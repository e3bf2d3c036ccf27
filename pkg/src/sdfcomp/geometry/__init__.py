"""Boundary representations, spatial index and distance queries."""

from .bvh import SpatialIndex
from .io import BoundaryParseError, load_boundary, write_off, write_poly2d
from .queries import (
    DistancePair,
    contact_region,
    gaze_cos,
    max_distance,
    pmc,
    pmc_many,
    signed_distance,
    signed_distance_many,
    zeta,
)
from .solid import (
    BoundarySolid,
    GeometryError,
    OpenBoundaryError,
    OrientationError,
    discretize_arc,
    polygon,
)

__all__ = [
    "BoundaryParseError", "BoundarySolid", "DistancePair", "GeometryError",
    "OpenBoundaryError", "OrientationError", "SpatialIndex", "contact_region",
    "discretize_arc", "gaze_cos", "load_boundary", "max_distance", "pmc", "pmc_many",
    "polygon", "signed_distance", "signed_distance_many", "write_off", "write_poly2d", "zeta",
]
