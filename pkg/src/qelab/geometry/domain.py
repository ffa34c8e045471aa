"""Piecewise-smooth planar domains built from circle arcs and segments.

The boundary is an ordered cycle of arcs traversed counterclockwise and
parametrised by global arclength ``s`` in ``[0, L)``. Inward normals are
the tangent rotated by +90 degrees.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from qelab.errors import ArclengthRangeError, DomainConstructionError, NoHitError
from qelab.geometry.arcs import (
    Arc,
    arc_from_spec,
    cross,
    signed_area_term,
)
from qelab.geometry.models import (
    ArcSpec,
    BoundaryPoint,
    BoundarySamples,
    CornerHit,
    NoHit,
    RayHit,
)

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

CLOSURE_TOL = 1e-12
CORNER_ANGLE_TOL = 1e-9
CORNER_REL_TOL = 1e-8
T_MIN_REL = 1e-10

# ray_hits status codes
HIT = 0
CORNER = 1
MISS = 2

# irrational-ish direction so parity rays avoid vertices and tangencies
_PARITY_DIRECTION = np.array([math.cos(0.3711), math.sin(0.3711)])


@dataclass(frozen=True, eq=False)
class Domain:
    """Immutable closed simple boundary with arclength bookkeeping."""

    specs: tuple[ArcSpec, ...]
    arcs: tuple[Arc, ...]
    offsets: FloatArray
    length: float
    area: float
    corners: tuple[float, ...]

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @property
    def has_corners(self) -> bool:
        return bool(self.corners)

    @property
    def delta_corner(self) -> float:
        return CORNER_REL_TOL * self.length

    @property
    def t_min(self) -> float:
        return T_MIN_REL * self.length

    def arc_length(self, i: int) -> float:
        return float(self.offsets[i + 1] - self.offsets[i])

    def corner_distance(self, s: FloatArray) -> FloatArray:
        """Circular arclength distance from ``s`` to the nearest corner."""
        s = np.asarray(s, dtype=float)
        if not self.corners:
            return np.full(s.shape, np.inf)
        c = np.asarray(self.corners)
        d = np.abs(s[..., None] - c)
        d = np.minimum(d, self.length - d)
        return d.min(axis=-1)


def _segments_cross(
    a0: FloatArray, a1: FloatArray, b0: FloatArray, b1: FloatArray
) -> npt.NDArray[np.bool_]:
    """Proper intersection test for chord arrays (broadcasting)."""
    da = a1 - a0
    db = b1 - b0
    d1 = cross(da, b0 - a0)
    d2 = cross(da, b1 - a0)
    d3 = cross(db, a0 - b0)
    d4 = cross(db, a1 - b0)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def _check_simple(arcs: Sequence[Arc]) -> None:
    """Reject self-intersecting boundaries by testing a fine polygonal proxy."""
    pts = []
    owner = []
    for i, arc in enumerate(arcs):
        poly = arc.chords()
        pts.append(poly[:-1])
        owner.extend([i] * (len(poly) - 1))
    vertices = np.concatenate(pts)
    owner_arr = np.asarray(owner)
    m = len(vertices)
    if m < 3:
        return
    start = vertices
    end = np.roll(vertices, -1, axis=0)
    hits = _segments_cross(start[:, None], end[:, None], start[None], end[None])
    k = np.arange(m)
    gap = np.abs(k[:, None] - k[None])
    neighbours = (gap <= 1) | (gap == m - 1)
    bad = np.argwhere(hits & ~neighbours)
    if len(bad):
        i, j = sorted((int(owner_arr[bad[0][0]]), int(owner_arr[bad[0][1]])))
        raise DomainConstructionError(f"boundary self-intersects: arcs {i} and {j} cross")


def build_domain(specs: Sequence[ArcSpec]) -> Domain:
    """Assemble a ``Domain`` from an ordered cycle of arc specifications.

    Args:
        specs: Arcs in traversal order; the end of arc i must coincide
            with the start of arc i+1, cyclically.

    Returns:
        Domain with length, area and corners populated.

    Raises:
        DomainConstructionError: If the curve is open, self-intersecting
            or traversed clockwise.
    """
    if not specs:
        raise DomainConstructionError("domain needs at least one arc")
    arcs = tuple(arc_from_spec(spec) for spec in specs)
    lengths = np.array([arc.length for arc in arcs])
    offsets = np.concatenate([[0.0], np.cumsum(lengths)])
    total = float(offsets[-1])

    corners: list[float] = []
    n = len(arcs)
    for i in range(n):
        j = (i + 1) % n
        end_pos, end_tan, _, _ = arcs[i].evaluate(np.array([arcs[i].length]))
        start_pos, start_tan, _, _ = arcs[j].evaluate(np.array([0.0]))
        gap = float(np.hypot(*(end_pos[0] - start_pos[0])))
        if gap > CLOSURE_TOL * max(total, 1.0):
            raise DomainConstructionError(
                f"junction {i}->{j} is open: endpoint gap {gap:.3e}"
            )
        turn = math.atan2(
            float(cross(end_tan[0], start_tan[0])), float(end_tan[0] @ start_tan[0])
        )
        if abs(turn) > CORNER_ANGLE_TOL:
            corners.append(float(offsets[j]) if j else 0.0)

    _check_simple(arcs)
    area = sum(signed_area_term(arc) for arc in arcs)
    if area <= 0:
        raise DomainConstructionError(
            f"boundary must be traversed counterclockwise (signed area {area:.6g})"
        )

    domain = Domain(
        specs=tuple(specs),
        arcs=arcs,
        offsets=offsets,
        length=total,
        area=float(area),
        corners=tuple(sorted(corners)),
    )
    log.debug(
        "domain_built",
        arcs=n,
        length=domain.length,
        area=domain.area,
        corners=len(domain.corners),
    )
    return domain


def _locate(domain: Domain, s: FloatArray) -> tuple[npt.NDArray[np.int64], FloatArray]:
    idx = np.searchsorted(domain.offsets, s, side="right") - 1
    idx = np.clip(idx, 0, domain.n_arcs - 1)
    return idx, s - domain.offsets[idx]


def boundary_points(domain: Domain, s: npt.ArrayLike) -> BoundarySamples:
    """Vectorised boundary geometry at arclengths ``s`` (each in [0, L))."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any((s < 0) | (s >= domain.length)) or not np.all(np.isfinite(s)):
        raise ArclengthRangeError(f"arclength outside [0, {domain.length})")
    idx, sigma = _locate(domain, s)
    pos = np.empty((len(s), 2))
    tan = np.empty((len(s), 2))
    nor = np.empty((len(s), 2))
    curv = np.empty(len(s))
    for i, arc in enumerate(domain.arcs):
        mask = idx == i
        if not mask.any():
            continue
        p, t, nv, k = arc.evaluate(sigma[mask])
        pos[mask], tan[mask], nor[mask], curv[mask] = p, t, nv, k
    return BoundarySamples(
        s=s, position=pos, tangent=tan, normal=nor, curvature=curv, arc_id=idx
    )


def boundary_point(domain: Domain, s: float) -> BoundaryPoint:
    """Boundary geometry at one arclength.

    Arclengths within ``delta_corner`` of a corner return the junction
    with ``at_corner`` set; tangent and normal are then those of the
    arc that starts there.

    Raises:
        ArclengthRangeError: If ``s`` lies outside ``[0, L)``.
    """
    if not 0.0 <= s < domain.length:
        raise ArclengthRangeError(f"s = {s} outside [0, {domain.length})")
    at_corner = bool(domain.corner_distance(np.array(s)) < domain.delta_corner)
    sample = boundary_points(domain, [s])[0]
    if not at_corner:
        return sample
    return BoundaryPoint(
        s=sample.s,
        position=sample.position,
        tangent=sample.tangent,
        normal=sample.normal,
        curvature=sample.curvature,
        arc_id=sample.arc_id,
        at_corner=True,
    )


def ray_hits(
    domain: Domain,
    origins: npt.ArrayLike,
    directions: npt.ArrayLike,
    t_min: float | None = None,
) -> tuple[FloatArray, FloatArray, npt.NDArray[np.int8]]:
    """First boundary hit for a batch of rays.

    Args:
        domain: Domain to intersect.
        origins: (M, 2) ray origins on or inside the closure.
        directions: (M, 2) unit directions.
        t_min: Smallest accepted travel distance; defaults to 1e-10 L.

    Returns:
        ``(s_hit, t_hit, status)`` with status ``HIT``, ``CORNER`` or
        ``MISS`` per ray. Missed rays carry ``nan`` arclength.
    """
    o = np.atleast_2d(np.asarray(origins, dtype=float))
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    o, d = np.broadcast_arrays(o, d)
    if t_min is None:
        t_min = domain.t_min
    best_t = np.full(len(o), np.inf)
    best_s = np.full(len(o), np.nan)
    for i, arc in enumerate(domain.arcs):
        for t, sigma in arc.intersections(o, d):
            better = (t > t_min) & (t < best_t)
            best_t = np.where(better, t, best_t)
            best_s = np.where(better, domain.offsets[i] + sigma, best_s)
    best_s = np.where(best_s >= domain.length, best_s - domain.length, best_s)
    status = np.full(len(o), HIT, dtype=np.int8)
    status[~np.isfinite(best_t)] = MISS
    near = domain.corner_distance(np.nan_to_num(best_s)) < domain.delta_corner
    status[(status == HIT) & near] = CORNER
    return best_s, best_t, status


def ray_first_hit(
    domain: Domain, origin: npt.ArrayLike, direction: npt.ArrayLike
) -> RayHit | CornerHit | NoHit:
    """First place a ray from ``origin`` meets the boundary again."""
    s, t, status = ray_hits(domain, origin, direction)
    if status[0] == MISS:
        log.warning("ray_missed_boundary", origin=np.asarray(origin).tolist())
        return NoHit()
    if status[0] == CORNER:
        # snap to the exact corner arclength
        c = np.asarray(domain.corners)
        dist = np.abs(c - s[0])
        dist = np.minimum(dist, domain.length - dist)
        return CornerHit(s=float(c[np.argmin(dist)]), t_hit=float(t[0]))
    return RayHit(s_hit=float(s[0]), t_hit=float(t[0]))


def contains(domain: Domain, z: npt.ArrayLike) -> npt.NDArray[np.bool_]:
    """Inside test by ray-crossing parity. Points on the boundary are unreliable."""
    pts = np.atleast_2d(np.asarray(z, dtype=float))
    d = np.broadcast_to(_PARITY_DIRECTION, pts.shape)
    count = np.zeros(len(pts), dtype=int)
    for arc in domain.arcs:
        for t, _ in arc.intersections(pts, d):
            count += (t > 0) & np.isfinite(t)
    return count % 2 == 1


def distance_to_boundary(domain: Domain, z: npt.ArrayLike) -> FloatArray:
    """Euclidean distance from points to the boundary curve."""
    pts = np.atleast_2d(np.asarray(z, dtype=float))
    return np.min([arc.distance(pts) for arc in domain.arcs], axis=0)


def centroid(domain: Domain) -> FloatArray:
    """Area centroid from the boundary integrals of x^2 dy and y^2 dx."""
    nodes, weights = np.polynomial.legendre.leggauss(64)
    mx = 0.0
    my = 0.0
    for arc in domain.arcs:
        sigma = 0.5 * arc.length * (nodes + 1.0)
        w = 0.5 * arc.length * weights
        pos, tan, _, _ = arc.evaluate(sigma)
        mx += float(np.sum(w * pos[:, 0] ** 2 * tan[:, 1]))
        my -= float(np.sum(w * pos[:, 1] ** 2 * tan[:, 0]))
    return np.array([mx, my]) / (2.0 * domain.area)


def radial_extent(
    domain: Domain, centre: npt.ArrayLike, directions: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Distance from ``centre`` to the boundary along each direction.

    Returns:
        ``(t, s)`` travel distances and boundary arclengths of the hits.

    Raises:
        NoHitError: If any ray misses (``centre`` outside the domain).
    """
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    o = np.broadcast_to(np.asarray(centre, dtype=float), d.shape)
    s, t, status = ray_hits(domain, o, d, t_min=0.0)
    if np.any(status == MISS):
        raise NoHitError("radial ray missed the boundary; centre outside domain?")
    return t, s

