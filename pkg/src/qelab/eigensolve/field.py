"""Interior fields from boundary traces and interior normalisation.

Green's representation with inward normals reads

    u(z) = integral of [ d/dnu' G0(z, y') a(y') - G0(z, y') b(y') ] dsigma(y')

with ``a = u|Y`` and ``b`` the inward normal derivative. The same
representation vanishes identically outside the domain; that extinction
is the boundary-condition residual used to discard spurious roots.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import structlog

from qelab.conditions import BoundaryKind
from qelab.discretize import (
    BoundaryGrid,
    interpolate_trace,
    multiplier_matrix,
    nystrom,
    refine_grid,
)
from qelab.eigensolve.interior import interior_quadrature
from qelab.eigensolve.models import Eigenpair, NormMethod
from qelab.errors import QuadratureError
from qelab.geometry import centroid, contains, distance_to_boundary
from qelab.kernels import (
    double_layer_matrix,
    green0_matrix,
    helmholtz_fd_residual,
    norm_splits,
)

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

NEAR_SPACINGS = 5.0
WARN_SPACINGS = 2.0
MAX_REFINE = 16


def boundary_data(pair: Eigenpair) -> tuple[ComplexArray, ComplexArray]:
    """``(a, b)``: boundary value and inward normal derivative of the eigenfunction."""
    u = pair.trace
    kind = pair.bc.kind
    if kind is BoundaryKind.NEUMANN:
        return u, np.zeros_like(u)
    if kind is BoundaryKind.DIRICHLET:
        return np.zeros_like(u), u
    if kind is BoundaryKind.ROBIN:
        return u, pair.bc.kappa * u
    return u, multiplier_matrix(pair.bc.alpha, pair.grid) @ u


def _layer_field(
    lam: float, grid: BoundaryGrid, a: ComplexArray, b: ComplexArray, z: FloatArray
) -> ComplexArray:
    w = grid.weights
    out = np.zeros(len(z), dtype=complex)
    if np.any(a):
        dl = double_layer_matrix(lam, z, grid.samples.position, grid.samples.normal)
        out += dl @ (w * a)
    if np.any(b):
        sl = green0_matrix(lam, z, grid.samples.position)
        out -= sl @ (w * b)
    return out


def evaluate_field(
    lam: float,
    grid: BoundaryGrid,
    a: ComplexArray,
    b: ComplexArray,
    z: npt.ArrayLike,
) -> ComplexArray:
    """Green representation at points ``z`` (inside or outside).

    Points within five grid spacings of the boundary are evaluated on a
    refined grid with resampled boundary data.
    """
    pts = np.atleast_2d(np.asarray(z, dtype=float))
    dist = distance_to_boundary(grid.domain, pts)
    h = grid.spacing
    need = np.ones(len(pts), dtype=int)
    close = dist < NEAR_SPACINGS * h
    if close.any():
        ratio = NEAR_SPACINGS * h / np.maximum(dist[close], 1e-300)
        need[close] = np.minimum(MAX_REFINE, 2 ** np.ceil(np.log2(ratio))).astype(int)
    if np.any(dist < WARN_SPACINGS * h / MAX_REFINE):
        log.warning(
            "field_near_boundary",
            points=int(np.sum(dist < WARN_SPACINGS * h / MAX_REFINE)),
            min_distance=float(dist.min()),
        )
    out = np.empty(len(pts), dtype=complex)
    for factor in np.unique(need):
        sel = need == factor
        if factor == 1:
            out[sel] = _layer_field(lam, grid, a, b, pts[sel])
            continue
        fine = refine_grid(grid, int(factor))
        fa = interpolate_trace(grid, fine, a) if np.any(a) else np.zeros(fine.n, complex)
        fb = interpolate_trace(grid, fine, b) if np.any(b) else np.zeros(fine.n, complex)
        out[sel] = _layer_field(lam, fine, fa, fb, pts[sel])
    return out


def interior_field(pair: Eigenpair, z: npt.ArrayLike) -> ComplexArray:
    """Eigenfunction value at interior points ``z``.

    Logs ``field_too_close`` when a point lies within two grid spacings
    of the boundary; such values come from a refined grid and are less
    accurate.
    """
    pts = np.atleast_2d(np.asarray(z, dtype=float))
    dist = distance_to_boundary(pair.grid.domain, pts)
    if np.any(dist < WARN_SPACINGS * pair.grid.spacing):
        log.warning("field_too_close", lam=pair.lam, min_distance=float(dist.min()))
    a, b = boundary_data(pair)
    return evaluate_field(pair.lam, pair.grid, a, b, pts)


def _offset_points(
    grid: BoundaryGrid, lam: float, count: int = 32
) -> tuple[FloatArray, FloatArray]:
    """Matched points just inside and just outside the boundary."""
    domain = grid.domain
    d = max(NEAR_SPACINGS * grid.spacing, math.pi / (2.0 * lam))
    idx = np.unique(np.linspace(0, grid.n - 1, count).round().astype(int))
    y = grid.samples.position[idx]
    nu = grid.samples.normal[idx]
    outside = y - d * nu
    inside = y + d * nu
    ok_out = ~contains(domain, outside) & (distance_to_boundary(domain, outside) > 0.5 * d)
    ok_in = contains(domain, inside) & (distance_to_boundary(domain, inside) > 0.5 * d)
    return outside[ok_out], inside[ok_in]


def bc_residual(pair: Eigenpair) -> float:
    """max |u| outside over max |u| inside at matched offset points.

    The representation of a genuine eigenfunction vanishes outside the
    domain, so this ratio is small for true eigenpairs.
    """
    outside, inside = _offset_points(pair.grid, pair.lam)
    if not len(outside) or not len(inside):
        return float("nan")
    a, b = boundary_data(pair)
    u_out = evaluate_field(pair.lam, pair.grid, a, b, outside)
    u_in = evaluate_field(pair.lam, pair.grid, a, b, inside)
    scale = float(np.max(np.abs(u_in)))
    if scale == 0.0:
        return float("inf")
    return float(np.max(np.abs(u_out)) / scale)


def probe_points(grid: BoundaryGrid, count: int = 5) -> FloatArray:
    """A few interior points well away from the boundary."""
    domain = grid.domain
    c = centroid(domain)
    idx = np.linspace(0, grid.n, count, endpoint=False).astype(int)
    pts = [c] if contains(domain, c)[0] else []
    for y in grid.samples.position[idx]:
        z = 0.5 * (c + y)
        if contains(domain, z)[0]:
            pts.append(z)
    if not pts:
        step = 0.1 * grid.domain.length / (2 * math.pi)
        pts = list(grid.samples.position[idx] + step * grid.samples.normal[idx])
    return np.asarray(pts)


def pde_residual(pair: Eigenpair, z: npt.ArrayLike | None = None) -> float:
    """Five-point Helmholtz residual over lam^2 max|u| at interior probe points."""
    pts = probe_points(pair.grid) if z is None else np.atleast_2d(np.asarray(z, float))
    h = 1e-2 / pair.lam
    a, b = boundary_data(pair)

    def field(p: FloatArray) -> ComplexArray:
        return evaluate_field(pair.lam, pair.grid, a, b, p)

    res = helmholtz_fd_residual(field, pts, pair.lam, h)
    scale = float(np.max(np.abs(field(pts))))
    if scale == 0.0:
        return float("inf")
    return float(np.max(res) / (pair.lam**2 * scale))


def green_gram(pairs: Sequence[Eigenpair]) -> npt.NDArray[np.complex128]:
    """Interior Gram matrix <u_k, u_l> from the lam-derivative boundary identity.

    All pairs must share one eigenvalue (a degenerate cluster) and grid:
    2 lam <u_k, u_l> = <S2_k, a_l> - <S1_k, b_l>.
    """
    lam = float(np.mean([p.lam for p in pairs]))
    grid = pairs[0].grid
    ker = norm_splits(lam, grid.geometry)
    a1, b1 = nystrom(ker.a1, grid), nystrom(ker.b1, grid)
    a2, b2 = nystrom(ker.a2, grid), nystrom(ker.b2, grid)
    data = [boundary_data(p) for p in pairs]
    n = len(pairs)
    gram = np.empty((n, n), dtype=complex)
    for k, (ak, bk) in enumerate(data):
        s1 = a1 @ ak + b1 @ bk
        s2 = a2 @ ak + b2 @ bk
        for l, (al, bl) in enumerate(data):
            gram[k, l] = (grid.inner(s2, al) - grid.inner(s1, bl)) / (2.0 * lam)
    return gram


def polar_gram(pairs: Sequence[Eigenpair], resolution: float = 1.0) -> npt.NDArray[np.complex128]:
    """Interior Gram matrix by direct quadrature of the reconstructed fields."""
    grid = pairs[0].grid
    quad = interior_quadrature(grid.domain, grid, max(p.lam for p in pairs), resolution)
    fields = []
    for p in pairs:
        a, b = boundary_data(p)
        fields.append(evaluate_field(p.lam, grid, a, b, quad.points))
    u = np.array(fields)
    return (u * quad.weights[None, :]) @ u.conj().T


def interior_gram(
    pairs: Sequence[Eigenpair], method: NormMethod = NormMethod.GREEN
) -> npt.NDArray[np.complex128]:
    """Gram matrix ``G[k, l] = <u_k, u_l>`` in L2 of the domain."""
    g = green_gram(pairs) if method is NormMethod.GREEN else polar_gram(pairs)
    g = 0.5 * (g + g.conj().T)
    if not np.all(np.isfinite(g)) or np.any(np.diag(g).real <= 0):
        raise QuadratureError("interior Gram matrix is not positive")
    return g


def _fix_phase(u: ComplexArray) -> ComplexArray:
    k = int(np.argmax(np.abs(u)))
    return u * (abs(u[k]) / u[k])


def orthonormalize(
    pairs: Sequence[Eigenpair], method: NormMethod = NormMethod.GREEN
) -> list[Eigenpair]:
    """Rescale (and within a cluster, rotate) traces to interior-orthonormal modes.

    Each resulting trace has its largest-modulus entry real and positive.
    """
    g = interior_gram(pairs, method)
    vals, vecs = np.linalg.eigh(g)
    if np.any(vals <= 0):
        raise QuadratureError("degenerate cluster Gram matrix is singular")
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    traces = np.array([p.trace for p in pairs])
    new = inv_sqrt @ traces
    return [
        p.with_(trace=_fix_phase(new[k]), normalized=True)
        for k, p in enumerate(pairs)
    ]


def normalize_interior(pair: Eigenpair, method: NormMethod = NormMethod.GREEN) -> Eigenpair:
    """Scale one trace so the interior eigenfunction has unit L2 norm.

    With ``NormMethod.POLAR`` the quadrature is repeated at double
    resolution and the pair is flagged if the two norms differ by more
    than 1e-4 relative.
    """
    if method is NormMethod.GREEN:
        return orthonormalize([pair], method)[0]
    coarse = polar_gram([pair], 1.0)[0, 0].real
    fine = polar_gram([pair], 2.0)[0, 0].real
    flagged = abs(fine - coarse) > 1e-4 * abs(fine)
    if flagged:
        log.warning("interior_norm_unconverged", lam=pair.lam, coarse=coarse, fine=fine)
    trace = _fix_phase(pair.trace / math.sqrt(fine))
    return pair.with_(trace=trace, normalized=True, norm_flagged=flagged)
