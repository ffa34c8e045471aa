"""Pydantic and dataclass models for planar domains."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator

Vec2 = tuple[float, float]


class ArcKind(str, Enum):
    """Supported boundary pieces."""

    CIRCLE_ARC = "circle-arc"
    LINE_SEGMENT = "line-segment"


class ArcSpec(BaseModel):
    """One smooth boundary piece, as read from a domain file.

    Circle arcs are traversed from ``angles[0]`` to ``angles[1]``; the
    traversal is counterclockwise when the end angle is larger, clockwise
    otherwise. Angles are radians.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ArcKind
    center: Vec2 | None = None
    radius: float | None = None
    angles: Vec2 | None = None
    endpoints: tuple[Vec2, Vec2] | None = None

    @model_validator(mode="after")
    def _check_kind_fields(self) -> ArcSpec:
        if self.kind is ArcKind.CIRCLE_ARC:
            if self.center is None or self.radius is None or self.angles is None:
                raise ValueError("circle-arc needs center, radius and angles")
            if self.endpoints is not None:
                raise ValueError("circle-arc does not take endpoints")
            if not self.radius > 0:
                raise ValueError(f"radius must be > 0, got {self.radius}")
            extent = abs(self.angles[1] - self.angles[0])
            if not 0 < extent <= 2 * math.pi + 1e-12:
                raise ValueError(f"angular extent must lie in (0, 2pi], got {extent}")
        else:
            if self.endpoints is None:
                raise ValueError("line-segment needs endpoints")
            if any(v is not None for v in (self.center, self.radius, self.angles)):
                raise ValueError("line-segment takes only endpoints")
            (x0, y0), (x1, y1) = self.endpoints
            if math.hypot(x1 - x0, y1 - y0) == 0:
                raise ValueError("segment endpoints must be distinct")
        return self

    @property
    def orientation(self) -> int:
        """+1 for counterclockwise circle traversal, -1 for clockwise."""
        if self.angles is None:
            return 1
        return 1 if self.angles[1] > self.angles[0] else -1

    @classmethod
    def circle(
        cls,
        center: Vec2,
        radius: float,
        start: float,
        end: float,
    ) -> ArcSpec:
        """Circle arc from ``start`` to ``end`` (radians)."""
        return cls(
            kind=ArcKind.CIRCLE_ARC,
            center=center,
            radius=radius,
            angles=(start, end),
        )

    @classmethod
    def segment(cls, p: Vec2, q: Vec2) -> ArcSpec:
        """Straight segment from ``p`` to ``q``."""
        return cls(kind=ArcKind.LINE_SEGMENT, endpoints=(p, q))


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """Geometry of the boundary at one arclength."""

    s: float
    position: npt.NDArray[np.float64]
    tangent: npt.NDArray[np.float64]
    normal: npt.NDArray[np.float64]
    curvature: float
    arc_id: int
    at_corner: bool = False


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    """Vectorised boundary geometry at an array of arclengths."""

    s: npt.NDArray[np.float64]
    position: npt.NDArray[np.float64]
    tangent: npt.NDArray[np.float64]
    normal: npt.NDArray[np.float64]
    curvature: npt.NDArray[np.float64]
    arc_id: npt.NDArray[np.int64]

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i: int) -> BoundaryPoint:
        return BoundaryPoint(
            s=float(self.s[i]),
            position=self.position[i],
            tangent=self.tangent[i],
            normal=self.normal[i],
            curvature=float(self.curvature[i]),
            arc_id=int(self.arc_id[i]),
        )


@dataclass(frozen=True)
class RayHit:
    """Ray met a smooth boundary point."""

    s_hit: float
    t_hit: float


@dataclass(frozen=True)
class CornerHit:
    """Ray ended at (within tolerance of) a corner."""

    s: float
    t_hit: float


@dataclass(frozen=True)
class NoHit:
    """Ray found no boundary intersection."""

    reason: str = "no intersection"
