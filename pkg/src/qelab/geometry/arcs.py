"""Circle-arc and segment primitives with closed-form ray intersection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from qelab.geometry.models import ArcKind, ArcSpec

FloatArray = npt.NDArray[np.float64]

TWO_PI = 2.0 * math.pi


def rot90(v: FloatArray) -> FloatArray:
    """Rotate vectors (..., 2) by +90 degrees."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def cross(a: FloatArray, b: FloatArray) -> FloatArray:
    """2D scalar cross product along the last axis."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True, eq=False)
class CircleArc:
    """Arc of a circle parametrised by local arclength."""

    center: FloatArray
    radius: float
    start_angle: float
    orientation: int
    extent: float

    @property
    def length(self) -> float:
        return self.radius * self.extent

    @property
    def is_full_circle(self) -> bool:
        return self.extent >= TWO_PI - 1e-12

    def angle_at(self, sigma: FloatArray) -> FloatArray:
        return self.start_angle + self.orientation * sigma / self.radius

    def evaluate(
        self, sigma: FloatArray
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        """Position, unit tangent, inward normal and signed curvature."""
        theta = self.angle_at(sigma)
        radial = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        pos = self.center + self.radius * radial
        tangent = self.orientation * rot90(radial)
        normal = rot90(tangent)
        curvature = np.full(np.shape(sigma), self.orientation / self.radius)
        return pos, tangent, normal, curvature

    def local_arclength(self, points: FloatArray) -> FloatArray:
        """Local arclength of points assumed to lie on the circle."""
        rel = points - self.center
        phi = np.arctan2(rel[..., 1], rel[..., 0])
        sigma = self.radius * np.mod((phi - self.start_angle) * self.orientation, TWO_PI)
        if not self.is_full_circle:
            # points just before the start angle wrap to ~2*pi*R
            wrap = sigma > self.radius * TWO_PI - 1e-12 * self.radius
            sigma = np.where(wrap, 0.0, sigma)
        return sigma

    def intersections(
        self, origins: FloatArray, directions: FloatArray
    ) -> list[tuple[FloatArray, FloatArray]]:
        """Candidate (t, sigma) pairs; invalid entries carry t = inf."""
        w = origins - self.center
        b = np.einsum("ij,ij->i", directions, w)
        c = np.einsum("ij,ij->i", w, w) - self.radius**2
        disc = b * b - c
        ok = disc >= 0
        root = np.sqrt(np.where(ok, disc, 0.0))
        out = []
        tol = 1e-12 * self.radius
        for t in (-b - root, -b + root):
            t = np.where(ok, t, np.inf)
            pts = origins + np.where(np.isfinite(t), t, 0.0)[:, None] * directions
            sigma = self.local_arclength(pts)
            inside = sigma <= self.length + tol
            out.append((np.where(inside, t, np.inf), np.minimum(sigma, self.length)))
        return out

    def distance(self, points: FloatArray) -> FloatArray:
        rel = points - self.center
        rho = np.hypot(rel[..., 0], rel[..., 1])
        radial = np.abs(rho - self.radius)
        if self.is_full_circle:
            return radial
        sigma = self.local_arclength(points)
        on_span = sigma <= self.length
        p0 = self.evaluate(np.array([0.0]))[0][0]
        p1 = self.evaluate(np.array([self.length]))[0][0]
        ends = np.minimum(
            np.hypot(*(points - p0).T),
            np.hypot(*(points - p1).T),
        )
        return np.where(on_span, radial, ends)

    def chords(self, n: int = 64) -> FloatArray:
        sigma = np.linspace(0.0, self.length, n + 1)
        return self.evaluate(sigma)[0]


@dataclass(frozen=True, eq=False)
class LineSegment:
    """Straight segment parametrised by local arclength."""

    p: FloatArray
    q: FloatArray

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.q - self.p)))

    @property
    def unit(self) -> FloatArray:
        return (self.q - self.p) / self.length

    def evaluate(
        self, sigma: FloatArray
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        sigma = np.asarray(sigma, dtype=float)
        pos = self.p + sigma[..., None] * self.unit
        tangent = np.broadcast_to(self.unit, pos.shape).copy()
        normal = rot90(tangent)
        return pos, tangent, normal, np.zeros(sigma.shape)

    def intersections(
        self, origins: FloatArray, directions: FloatArray
    ) -> list[tuple[FloatArray, FloatArray]]:
        e = self.q - self.p
        denom = cross(directions, np.broadcast_to(e, directions.shape))
        rel = self.p - origins
        safe = np.abs(denom) > 1e-300
        d = np.where(safe, denom, 1.0)
        t = cross(rel, np.broadcast_to(e, rel.shape)) / d
        u = cross(rel, directions) / d
        tol = 1e-12
        ok = safe & (u >= -tol) & (u <= 1.0 + tol)
        sigma = np.clip(u, 0.0, 1.0) * self.length
        return [(np.where(ok, t, np.inf), sigma)]

    def distance(self, points: FloatArray) -> FloatArray:
        e = self.q - self.p
        u = np.clip(((points - self.p) @ e) / (e @ e), 0.0, 1.0)
        foot = self.p + u[..., None] * e
        return np.hypot(*(points - foot).T)

    def chords(self, n: int = 1) -> FloatArray:
        return np.stack([self.p, self.q])


Arc = CircleArc | LineSegment


def arc_from_spec(spec: ArcSpec) -> Arc:
    """Build the numerical primitive for one ``ArcSpec``."""
    if spec.kind is ArcKind.CIRCLE_ARC:
        assert spec.center is not None and spec.radius is not None
        assert spec.angles is not None
        a0, a1 = spec.angles
        return CircleArc(
            center=np.asarray(spec.center, dtype=float),
            radius=float(spec.radius),
            start_angle=float(a0),
            orientation=spec.orientation,
            extent=min(abs(a1 - a0), TWO_PI),
        )
    assert spec.endpoints is not None
    p, q = spec.endpoints
    return LineSegment(p=np.asarray(p, dtype=float), q=np.asarray(q, dtype=float))


def signed_area_term(arc: Arc) -> float:
    """Contribution of one arc to (1/2) * closed integral of x dy - y dx."""
    if isinstance(arc, LineSegment):
        return 0.5 * float(cross(arc.p, arc.q))
    a = arc.start_angle
    b = a + arc.orientation * arc.extent
    cx, cy = arc.center
    r = arc.radius
    moment = cx * (math.sin(b) - math.sin(a)) - cy * (math.cos(b) - math.cos(a))
    total = r * r * (b - a) + r * moment
    return 0.5 * total
