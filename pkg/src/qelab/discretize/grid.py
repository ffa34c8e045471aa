"""Boundary quadrature grids.

Corner-free boundaries get a uniform periodic grid and the Kress
log-split trapezoid rule. Boundaries with corners get composite
Gauss-Legendre panels on each arc, graded toward both arc ends, with
product integration of the logarithm on the same and neighbouring
panels.

Either way the grid exposes the same three arrays, so a kernel split
``K1 log r^2 + K2`` becomes a Nystrom matrix

    A_ij = log_weights_ij K1_ij + w_j (K_ij - K1_ij log_reference_ij)

with the diagonal taken from the split's limits (see ``nystrom``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
import structlog
from scipy import interpolate, signal
from scipy.linalg import circulant

from qelab.errors import ResourceLimitError, UnsupportedConfigurationError
from qelab.geometry import BoundarySamples, Domain, boundary_points
from qelab.kernels import PairGeometry

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

MIN_PPW = 6.0
MIN_NODES = 64
PANEL_ORDER = 16
GRADING_EXPONENT = 3
_FINE_ORDER = 32


def grading(t: FloatArray) -> FloatArray:
    """t^3 / (t^3 + (1 - t)^3): clusters nodes at both ends of [0, 1]."""
    a = t**GRADING_EXPONENT
    b = (1.0 - t) ** GRADING_EXPONENT
    return a / (a + b)


def grading_derivative(t: FloatArray) -> FloatArray:
    a = t**GRADING_EXPONENT
    b = (1.0 - t) ** GRADING_EXPONENT
    return 3.0 * t * t * (1.0 - t) ** 2 / (a + b) ** 2


@dataclass(frozen=True, eq=False)
class Panel:
    arc: int
    t0: float
    t1: float
    nodes: npt.NDArray[np.int64]


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Quadrature nodes and weights on the boundary.

    Attributes:
        domain: Underlying domain.
        samples: Boundary geometry at the nodes.
        weights: Quadrature weights (length units); they sum to L.
        uniform: True for the periodic trapezoid grid.
        arc_counts: Nodes per arc.
        grading_exponent: 0 on uniform grids, 3 on panel grids.
        t: Arc-local parameter of each node (panel grids).
        dsdt: ds/dt at each node (panel grids).
        panels: Panel layout (panel grids).
    """

    domain: Domain
    samples: BoundarySamples
    weights: FloatArray
    uniform: bool
    arc_counts: tuple[int, ...]
    grading_exponent: int = 0
    t: FloatArray | None = None
    dsdt: FloatArray | None = None
    panels: tuple[Panel, ...] = ()
    order: int = PANEL_ORDER

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def s(self) -> FloatArray:
        return self.samples.s

    @property
    def spacing(self) -> float:
        return float(np.max(self.weights))

    def points_per_wavelength(self, lam: float) -> float:
        return self.n * 2.0 * math.pi / (self.domain.length * lam)

    @cached_property
    def geometry(self) -> PairGeometry:
        return PairGeometry(self.samples)

    @cached_property
    def log_quadrature(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        """``(log_weights, log_reference, diag_log)`` for the log-split rule."""
        if self.uniform:
            return _kress_log_quadrature(self.n, self.domain.length)
        return _panel_log_quadrature(self)

    def inner(self, u: npt.ArrayLike, v: npt.ArrayLike) -> complex:
        """Weighted inner product sum_i w_i u_i conj(v_i)."""
        return complex(np.sum(self.weights * np.asarray(u) * np.conj(np.asarray(v))))

    def norm(self, u: npt.ArrayLike) -> float:
        return math.sqrt(max(self.inner(u, u).real, 0.0))


def _target_nodes(domain: Domain, ppw: float, lam: float) -> int:
    raw = ppw * domain.length * lam / (2.0 * math.pi)
    return max(MIN_NODES, 2 * math.ceil(raw / 2.0 - 1e-9))


def make_grid(
    domain: Domain,
    points_per_wavelength: float,
    lam: float,
    max_nodes: int = 4096,
    nodes: int | None = None,
) -> BoundaryGrid:
    """Grid with about ``ppw * L * lam / (2 pi)`` nodes (even, at least 64).

    Args:
        domain: Domain to discretise.
        points_per_wavelength: Nodes per wavelength 2 pi / lam, at least 6.
        lam: Wavenumber the grid must resolve.
        max_nodes: Resource ceiling.
        nodes: Explicit node count overriding the ppw rule.

    Raises:
        ValueError: If ppw < 6.
        ResourceLimitError: If the node count exceeds ``max_nodes``.
    """
    if points_per_wavelength < MIN_PPW:
        raise ValueError(f"points_per_wavelength must be >= {MIN_PPW}")
    n = nodes if nodes is not None else _target_nodes(domain, points_per_wavelength, lam)
    if n > max_nodes:
        raise ResourceLimitError(f"grid needs {n} nodes, limit is {max_nodes}")
    if not domain.has_corners:
        grid = uniform_grid(domain, n + (n % 2))
    else:
        per_arc = [
            max(2, math.ceil(n * domain.arc_length(i) / domain.length / PANEL_ORDER))
            for i in range(domain.n_arcs)
        ]
        edges = [np.linspace(0.0, 1.0, k + 1) for k in per_arc]
        grid = panel_grid(domain, edges)
        if grid.n > max_nodes:
            raise ResourceLimitError(f"grid needs {grid.n} nodes, limit is {max_nodes}")
    log.debug("grid_built", nodes=grid.n, uniform=grid.uniform, lam=lam)
    return grid


def uniform_grid(domain: Domain, n: int) -> BoundaryGrid:
    s = np.arange(n) * (domain.length / n)
    samples = boundary_points(domain, s)
    counts = np.bincount(samples.arc_id, minlength=domain.n_arcs)
    return BoundaryGrid(
        domain=domain,
        samples=samples,
        weights=np.full(n, domain.length / n),
        uniform=True,
        arc_counts=tuple(int(c) for c in counts),
    )


def panel_grid(
    domain: Domain, edges: list[FloatArray], order: int = PANEL_ORDER
) -> BoundaryGrid:
    """Graded Gauss-Legendre panels; ``edges[i]`` are panel breaks in t for arc i."""
    x, wx = np.polynomial.legendre.leggauss(order)
    s_all, w_all, t_all, j_all = [], [], [], []
    panels: list[Panel] = []
    counts = []
    start = 0
    for i, br in enumerate(edges):
        ell = domain.arc_length(i)
        for t0, t1 in zip(br[:-1], br[1:], strict=True):
            t = t0 + 0.5 * (x + 1.0) * (t1 - t0)
            dsdt = ell * grading_derivative(t)
            s_all.append(domain.offsets[i] + ell * grading(t))
            w_all.append(dsdt * wx * 0.5 * (t1 - t0))
            t_all.append(t)
            j_all.append(dsdt)
            nodes = np.arange(start, start + order)
            panels.append(Panel(arc=i, t0=float(t0), t1=float(t1), nodes=nodes))
            start += order
        counts.append(order * (len(br) - 1))
    s = np.concatenate(s_all)
    samples = boundary_points(domain, s)
    return BoundaryGrid(
        domain=domain,
        samples=samples,
        weights=np.concatenate(w_all),
        uniform=False,
        arc_counts=tuple(counts),
        grading_exponent=GRADING_EXPONENT,
        t=np.concatenate(t_all),
        dsdt=np.concatenate(j_all),
        panels=tuple(panels),
        order=order,
    )


def kress_weights(n: int) -> FloatArray:
    """R_k for ``n`` uniform nodes on [0, 2 pi): weights of log(4 sin^2((t - t_k) / 2))."""
    if n % 2:
        raise ValueError("Kress quadrature needs an even node count")
    half = n // 2
    k = np.arange(n)
    m = np.arange(1, half)
    phase = np.cos(np.outer(k, m) * math.pi / half)
    return -(2 * math.pi / half) * (phase / m).sum(axis=1) - (math.pi / half**2) * np.cos(
        k * math.pi
    )


def _kress_log_quadrature(n: int, length: float) -> tuple[FloatArray, FloatArray, FloatArray]:
    scale = length / (2 * math.pi)
    weights = scale * circulant(kress_weights(n))
    idx = np.arange(n)
    diff = (idx[:, None] - idx[None, :]) * (math.pi / n)
    with np.errstate(divide="ignore"):
        ref = np.log(4.0 * np.sin(diff) ** 2)
    np.fill_diagonal(ref, 0.0)
    return weights, ref, np.full(n, math.log(scale**2))


def _clustered_rule(t_target: float, a: float, b: float) -> tuple[FloatArray, FloatArray]:
    """Nodes and weights on [a, b] clustered cubically at the point nearest ``t_target``."""
    v, wv = np.polynomial.legendre.leggauss(_FINE_ORDER)
    v = 0.5 * (v + 1.0)
    wv = 0.5 * wv
    nodes, weights = [], []
    pieces = []
    if a < t_target < b:
        pieces = [(t_target, a), (t_target, b)]
    elif t_target <= a:
        pieces = [(a, b)]
    else:
        pieces = [(b, a)]
    for c, far in pieces:
        span = far - c
        nodes.append(c + span * v**3)
        weights.append(abs(span) * 3.0 * v**2 * wv)
    return np.concatenate(nodes), np.concatenate(weights)


def _panel_log_quadrature(grid: BoundaryGrid) -> tuple[FloatArray, FloatArray, FloatArray]:
    assert grid.t is not None and grid.dsdt is not None
    n = grid.n
    weights = np.zeros((n, n))
    ref = np.zeros((n, n))
    t = grid.t
    by_arc: dict[int, list[int]] = {}
    for k, p in enumerate(grid.panels):
        by_arc.setdefault(p.arc, []).append(k)
    for arc_panels in by_arc.values():
        for pos, b in enumerate(arc_panels):
            src = grid.panels[b]
            basis = interpolate.BarycentricInterpolator(t[src.nodes], np.eye(len(src.nodes)))
            near = arc_panels[max(pos - 1, 0) : pos + 2]
            targets = np.concatenate([grid.panels[k].nodes for k in near])
            for i in targets:
                tau, om = _clustered_rule(float(t[i]), src.t0, src.t1)
                with np.errstate(divide="ignore"):
                    lg = np.log((t[i] - tau) ** 2)
                lg = np.where(np.isfinite(lg), lg, 0.0)
                weights[i, src.nodes] = (om * lg) @ basis(tau) * grid.dsdt[src.nodes]
                with np.errstate(divide="ignore"):
                    row = np.log((t[i] - t[src.nodes]) ** 2)
                ref[i, src.nodes] = np.where(src.nodes == i, 0.0, row)
    diag = np.log(grid.dsdt**2)
    return weights, ref, diag


def refine_grid(grid: BoundaryGrid, factor: int) -> BoundaryGrid:
    """Grid with ``factor`` times the nodes, nested panel-wise on panel grids."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    if factor == 1:
        return grid
    if grid.uniform:
        return uniform_grid(grid.domain, grid.n * factor)
    edges = []
    for i in range(grid.domain.n_arcs):
        breaks = [p.t0 for p in grid.panels if p.arc == i] + [
            max(p.t1 for p in grid.panels if p.arc == i)
        ]
        fine = [
            np.linspace(a, b, factor + 1)[:-1] for a, b in zip(breaks[:-1], breaks[1:], strict=True)
        ]
        edges.append(np.concatenate([*fine, [breaks[-1]]]))
    return panel_grid(grid.domain, edges, grid.order)


def interpolate_trace(
    grid: BoundaryGrid, fine: BoundaryGrid, u: npt.ArrayLike
) -> npt.NDArray[np.complex128]:
    """Resample a grid function onto a refinement of ``grid``.

    Uniform grids use FFT resampling; panel grids interpolate each panel
    from its Gauss-Legendre nodes.

    Raises:
        UnsupportedConfigurationError: If ``fine`` is not a refinement of ``grid``.
    """
    u = np.asarray(u, dtype=complex)
    if grid.uniform != fine.uniform:
        raise UnsupportedConfigurationError("grids are of different types")
    if grid.uniform:
        if fine.n % grid.n:
            raise UnsupportedConfigurationError("fine grid is not a refinement")
        return signal.resample(u, fine.n)
    assert grid.t is not None and fine.t is not None
    out = np.empty(fine.n, dtype=complex)
    for coarse in grid.panels:
        children = [
            p for p in fine.panels
            if p.arc == coarse.arc and p.t0 >= coarse.t0 - 1e-14 and p.t1 <= coarse.t1 + 1e-14
        ]
        if not children:
            raise UnsupportedConfigurationError("fine grid is not a refinement")
        interp = interpolate.BarycentricInterpolator(grid.t[coarse.nodes], u[coarse.nodes])
        for child in children:
            out[child.nodes] = interp(fine.t[child.nodes])
    return out
