"""Interior quadrature rules for direct L2 integration of eigenfunctions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from qelab.discretize import BoundaryGrid
from qelab.geometry import Domain, boundary_points, centroid, contains, radial_extent

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class InteriorQuadrature:
    points: FloatArray
    weights: FloatArray
    kind: str

    @property
    def area(self) -> float:
        return float(self.weights.sum())


def is_star_shaped(domain: Domain, centre: FloatArray, samples: int = 512) -> bool:
    """True if every sampled boundary point is the first hit of its ray from ``centre``."""
    s = np.linspace(0.0, domain.length, samples, endpoint=False)
    pts = boundary_points(domain, s).position
    rel = pts - centre
    dist = np.hypot(rel[:, 0], rel[:, 1])
    if np.any(dist == 0):
        return False
    t, _ = radial_extent(domain, centre, rel / dist[:, None])
    return bool(np.all(t >= dist * (1.0 - 1e-9)))


def _junction_angles(domain: Domain, centre: FloatArray) -> FloatArray:
    pts = boundary_points(domain, domain.offsets[:-1]).position - centre
    return np.sort(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi))


def polar_quadrature(
    domain: Domain, centre: FloatArray, n_radial: int, n_angular: int
) -> InteriorQuadrature:
    """Gauss-Legendre in radius out to the boundary; sectors between arc junctions in angle."""
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    if domain.n_arcs == 1:
        theta = np.arange(n_angular) * (2 * math.pi / n_angular)
        w_theta = np.full(n_angular, 2 * math.pi / n_angular)
    else:
        breaks = _junction_angles(domain, centre)
        breaks = np.concatenate([breaks, [breaks[0] + 2 * math.pi]])
        th, wt = [], []
        for a, b in zip(breaks[:-1], breaks[1:], strict=True):
            if b - a < 1e-14:
                continue
            k = max(4, math.ceil(n_angular * (b - a) / (2 * math.pi)))
            xa, wa = np.polynomial.legendre.leggauss(k)
            th.append(a + 0.5 * (xa + 1.0) * (b - a))
            wt.append(0.5 * (b - a) * wa)
        theta = np.concatenate(th)
        w_theta = np.concatenate(wt)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    extent, _ = radial_extent(domain, centre, dirs)
    rho = 0.5 * (xr[None, :] + 1.0) * extent[:, None]
    w = w_theta[:, None] * 0.5 * extent[:, None] * wr[None, :] * rho
    pts = centre + rho[..., None] * dirs[:, None, :]
    return InteriorQuadrature(points=pts.reshape(-1, 2), weights=w.ravel(), kind="polar")


def tensor_quadrature(domain: Domain, n: int) -> InteriorQuadrature:
    """Midpoint rule on a bounding-box tensor grid masked to the domain."""
    s = np.linspace(0.0, domain.length, 4096, endpoint=False)
    pos = boundary_points(domain, s).position
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    h = float(max(hi - lo)) / n
    xs = np.arange(lo[0] + h / 2, hi[0], h)
    ys = np.arange(lo[1] + h / 2, hi[1], h)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = contains(domain, pts)
    return InteriorQuadrature(
        points=pts[inside], weights=np.full(int(inside.sum()), h * h), kind="tensor"
    )


def interior_quadrature(
    domain: Domain, grid: BoundaryGrid, lam: float, resolution: float = 1.0
) -> InteriorQuadrature:
    """Polar rule about the centroid, or the tensor fallback for non-star-shaped domains."""
    c = centroid(domain)
    n_angular = max(32, int(resolution * grid.n))
    if contains(domain, c)[0] and is_star_shaped(domain, c):
        extent = float(radial_extent(domain, c, [[1.0, 0.0]])[0][0])
        span = max(extent, domain.length / (2 * math.pi))
        n_radial = max(24, math.ceil(resolution * 2.0 * lam * span))
        return polar_quadrature(domain, c, n_radial, n_angular)
    log.info("interior_quadrature_fallback", reason="not star-shaped about centroid")
    return tensor_quadrature(domain, max(64, int(resolution * grid.n)))
