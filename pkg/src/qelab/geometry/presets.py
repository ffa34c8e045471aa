"""Stock domains used by tests and bundled configs."""

from __future__ import annotations

import math
from collections.abc import Sequence

from qelab.geometry.domain import Domain, build_domain
from qelab.geometry.models import ArcSpec, Vec2


def disk(radius: float = 1.0, center: Vec2 = (0.0, 0.0)) -> Domain:
    return build_domain([ArcSpec.circle(center, radius, 0.0, 2 * math.pi)])


def unit_disk() -> Domain:
    return disk()


def stadium_specs(a: float = 1.0, r: float = 1.0) -> list[ArcSpec]:
    """Bunimovich stadium: straight sides of length 2a, caps of radius r."""
    half = math.pi / 2
    return [
        ArcSpec.segment((-a, -r), (a, -r)),
        ArcSpec.circle((a, 0.0), r, -half, half),
        ArcSpec.segment((a, r), (-a, r)),
        ArcSpec.circle((-a, 0.0), r, half, 3 * half),
    ]


def stadium(a: float = 1.0, r: float = 1.0) -> Domain:
    return build_domain(stadium_specs(a, r))


def polygon(vertices: Sequence[Vec2]) -> Domain:
    """Polygon through ``vertices`` listed counterclockwise."""
    n = len(vertices)
    return build_domain(
        [ArcSpec.segment(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    )


def unit_square() -> Domain:
    return polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
