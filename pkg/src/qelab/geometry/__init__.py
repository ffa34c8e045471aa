"""Planar domain geometry: arcs, arclength, normals and ray casting."""

from qelab.geometry.domain import (
    CORNER,
    HIT,
    MISS,
    Domain,
    boundary_point,
    boundary_points,
    build_domain,
    centroid,
    contains,
    distance_to_boundary,
    radial_extent,
    ray_first_hit,
    ray_hits,
)
from qelab.geometry.models import (
    ArcKind,
    ArcSpec,
    BoundaryPoint,
    BoundarySamples,
    CornerHit,
    NoHit,
    RayHit,
)
from qelab.geometry.presets import disk, polygon, stadium, unit_disk, unit_square

__all__ = [
    "CORNER",
    "HIT",
    "MISS",
    "ArcKind",
    "ArcSpec",
    "BoundaryPoint",
    "BoundarySamples",
    "CornerHit",
    "Domain",
    "NoHit",
    "RayHit",
    "boundary_point",
    "boundary_points",
    "build_domain",
    "centroid",
    "contains",
    "disk",
    "distance_to_boundary",
    "polygon",
    "radial_extent",
    "ray_first_hit",
    "ray_hits",
    "stadium",
    "unit_disk",
    "unit_square",
]
