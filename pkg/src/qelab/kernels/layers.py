"""Free-space Helmholtz Green function and the boundary layer kernels.

Conventions: normals point into the domain and

    G0(z, z')  = (i/4) H0(lam |z - z'|)
    F(y, y')   = 2 d/dnu_y G0(y, y') = -(i lam / 2) H1(lam r) nu_y . (y - y') / r
    E(y, y')   = 2 G0(y, y')

F carries the normal of its first point, so the operator acting on
boundary traces integrates over that point: (F u)(y') = int F(y, y') u(y) dsigma(y).
Its Nystrom matrix is therefore F[i, j] = F(y_j, y_i).

Every weakly singular kernel is described by a :class:`KernelSplit`
``K = K1 log(r^2) + K2`` with ``K1, K2`` smooth, together with the
diagonal values of ``K1`` and ``K2``. The discretisation layer turns a
split into a Nystrom matrix for any grid.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
from scipy import special

from qelab.errors import DiagonalError
from qelab.geometry import BoundaryPoint, BoundarySamples
from qelab.kernels.special import EULER_GAMMA, hankel0, hankel1

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

NEAR_DIAGONAL = 1e-6


@dataclass(frozen=True)
class Wavenumber:
    """Spectral parameter lam > 0 and semiclassical h = 1 / lam."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"wavenumber must be positive, got {self.lam}")

    @property
    def h(self) -> float:
        return 1.0 / self.lam


@dataclass(frozen=True)
class KernelValue:
    value: complex
    near_diagonal: bool = False


def _lam(lam: float | Wavenumber) -> float:
    return lam.lam if isinstance(lam, Wavenumber) else Wavenumber(float(lam)).lam


def green0(lam: float | Wavenumber, z: npt.ArrayLike, zp: npt.ArrayLike) -> KernelValue:
    """(i/4) H0(lam r) for distinct points.

    Raises:
        DiagonalError: If ``z == zp``.
    """
    k = _lam(lam)
    r = float(np.hypot(*(np.asarray(z, float) - np.asarray(zp, float))))
    if r == 0.0:
        raise DiagonalError("green0 is singular at coincident points")
    value = 0.25j * complex(hankel0(np.array(k * r)))
    return KernelValue(value=value, near_diagonal=k * r < NEAR_DIAGONAL)


def green0_matrix(lam: float, targets: FloatArray, sources: FloatArray) -> ComplexArray:
    """(M, K) matrix of G0 between target and source points (all distinct)."""
    d = targets[:, None, :] - sources[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    return 0.25j * hankel0(lam * r)


def double_layer_matrix(
    lam: float, targets: FloatArray, sources: FloatArray, source_normals: FloatArray
) -> ComplexArray:
    """(M, K) matrix of d/dnu' G0(z, y') = (i lam / 4) H1(lam r) nu' . (z - y') / r."""
    d = targets[:, None, :] - sources[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    c = np.einsum("mkj,kj->mk", d, source_normals) / r
    return 0.25j * lam * hankel1(lam * r) * c


def F_kernel(lam: float | Wavenumber, y: BoundaryPoint, yp: BoundaryPoint) -> KernelValue:
    """Double-layer kernel 2 d/dnu_y G0(y, y') with its diagonal limit kappa / (2 pi).

    The normal is taken at ``y``; see the module docstring for how the
    trace operator uses this kernel.

    Raises:
        DiagonalError: At coincident points on a corner.
    """
    k = _lam(lam)
    d = y.position - yp.position
    r = float(np.hypot(*d))
    if r == 0.0:
        if y.at_corner or yp.at_corner:
            raise DiagonalError("double-layer diagonal is undefined at a corner")
        return KernelValue(value=complex(y.curvature / (2 * math.pi)), near_diagonal=True)
    c = float(y.normal @ d) / r
    value = -0.5j * k * complex(hankel1(np.array(k * r))) * c
    return KernelValue(value=value, near_diagonal=k * r < NEAR_DIAGONAL)


def E_kernel(
    lam: float | Wavenumber, y: BoundaryPoint, yp: BoundaryPoint, length: float
) -> tuple[complex, complex]:
    """Single-layer kernel split as ``smooth + logcoef * log(4 sin^2(pi (s - s') / L))``.

    Returns:
        ``(smooth, logcoef)``.
    """
    k = _lam(lam)
    r = float(np.hypot(*(y.position - yp.position)))
    logcoef = complex(-special.j0(k * r) / (2 * math.pi))
    if r == 0.0:
        smooth = e_diagonal(k) + logcoef * math.log((length / (2 * math.pi)) ** 2)
        return smooth, logcoef
    full = 0.5j * complex(hankel0(np.array(k * r)))
    ref = math.log(4.0 * math.sin(math.pi * (y.s - yp.s) / length) ** 2)
    return full - logcoef * ref, logcoef


def e_diagonal(lam: float) -> complex:
    """Limit of E - K1 log r^2 at r = 0: i/2 - (C + log(lam / 2)) / pi."""
    return 0.5j - (EULER_GAMMA + math.log(lam / 2.0)) / math.pi


@dataclass(frozen=True, eq=False)
class PairGeometry:
    """Pairwise geometry between the nodes of one boundary sample set."""

    samples: BoundarySamples

    @cached_property
    def diff(self) -> FloatArray:
        p = self.samples.position
        return p[:, None, :] - p[None, :, :]

    @cached_property
    def r(self) -> FloatArray:
        r = np.hypot(self.diff[..., 0], self.diff[..., 1])
        np.fill_diagonal(r, 1.0)
        return r

    @cached_property
    def log_r2(self) -> FloatArray:
        out = np.log(self.r**2)
        np.fill_diagonal(out, 0.0)
        return out

    @cached_property
    def nu_src_d(self) -> FloatArray:
        """nu_{y'} . (y - y')."""
        return np.einsum("ijk,jk->ij", self.diff, self.samples.normal)

    @cached_property
    def nu_tgt_d(self) -> FloatArray:
        """nu_y . (y - y')."""
        return np.einsum("ijk,ik->ij", self.diff, self.samples.normal)

    @cached_property
    def nu_dot(self) -> FloatArray:
        n = self.samples.normal
        return n @ n.T

    @property
    def size(self) -> int:
        return len(self.samples)


@dataclass(frozen=True, eq=False)
class KernelSplit:
    """K = logcoef * log(r^2) + smooth, with explicit diagonal values.

    ``full`` holds K off the diagonal (its diagonal is ignored);
    ``diag_logcoef`` and ``diag_smooth`` are the limits of the two parts
    at coincident points.
    """

    full: ComplexArray
    logcoef: ComplexArray
    diag_logcoef: ComplexArray
    diag_smooth: ComplexArray

    def __add__(self, other: KernelSplit) -> KernelSplit:
        return KernelSplit(
            self.full + other.full,
            self.logcoef + other.logcoef,
            self.diag_logcoef + other.diag_logcoef,
            self.diag_smooth + other.diag_smooth,
        )

    def scaled(self, c: complex) -> KernelSplit:
        return KernelSplit(
            c * self.full, c * self.logcoef, c * self.diag_logcoef, c * self.diag_smooth
        )


def _bessels(
    lam: float, geo: PairGeometry
) -> tuple[FloatArray, FloatArray, ComplexArray, ComplexArray]:
    x = lam * geo.r
    j0 = special.j0(x)
    j1 = special.j1(x)
    return j0, j1, j0 + 1j * special.y0(x), j1 + 1j * special.y1(x)


def f_split(lam: float, geo: PairGeometry) -> KernelSplit:
    """Split of the trace operator F, entry (i, j) = F_kernel(lam, y_j, y_i).

    K1 = -(lam / 2 pi) J1(lam r) nu_j . (y_i - y_j) / r; diagonal kappa / 2 pi.
    """
    _, j1, _, h1 = _bessels(lam, geo)
    c = geo.nu_src_d / geo.r
    n = geo.size
    return KernelSplit(
        full=0.5j * lam * h1 * c,
        logcoef=-(lam / (2 * math.pi)) * j1 * c + 0j,
        diag_logcoef=np.zeros(n, dtype=complex),
        diag_smooth=geo.samples.curvature / (2 * math.pi) + 0j,
    )


def e_split(lam: float, geo: PairGeometry) -> KernelSplit:
    """Split of E: K1 = -J0(lam r) / (2 pi)."""
    j0, _, h0, _ = _bessels(lam, geo)
    n = geo.size
    return KernelSplit(
        full=0.5j * h0,
        logcoef=-j0 / (2 * math.pi) + 0j,
        diag_logcoef=np.full(n, -1.0 / (2 * math.pi), dtype=complex),
        diag_smooth=np.full(n, e_diagonal(lam)),
    )


@dataclass(frozen=True, eq=False)
class NormKernels:
    """Splits of the lam-derivative layer kernels.

    With ``a = u|Y`` and ``b`` the inward normal derivative,

        S1 = A1 a + B1 b     (boundary value of d/dlam of the layer representation)
        S2 = A2 a + B2 b     (its inward normal derivative)

    and ``2 lam ||u||^2 = <S2, a> - <S1, b>``.
    """

    a1: KernelSplit
    b1: KernelSplit
    a2: KernelSplit
    b2: KernelSplit


def norm_splits(lam: float, geo: PairGeometry) -> NormKernels:
    j0, j1, h0, h1 = _bessels(lam, geo)
    r = geo.r
    n = geo.size
    zero = np.zeros(n, dtype=complex)
    q = lam / (4 * math.pi)

    # (i lam / 4) H0 nu' . (y - y')
    a1 = KernelSplit(
        full=0.25j * lam * h0 * geo.nu_src_d,
        logcoef=-q * j0 * geo.nu_src_d + 0j,
        diag_logcoef=zero,
        diag_smooth=zero,
    )
    # (i / 4) r H1
    b1 = KernelSplit(
        full=0.25j * r * h1,
        logcoef=-r * j1 / (4 * math.pi) + 0j,
        diag_logcoef=zero,
        diag_smooth=np.full(n, 1.0 / (2 * math.pi * lam), dtype=complex),
    )
    # (i lam / 4) [-lam H1 (nu . d)(nu' . d) / r + H0 nu . nu']
    dd = geo.nu_tgt_d * geo.nu_src_d / r
    a2 = KernelSplit(
        full=0.25j * lam * (-lam * h1 * dd + h0 * geo.nu_dot),
        logcoef=(lam * lam / (4 * math.pi)) * j1 * dd - q * j0 * geo.nu_dot + 0j,
        diag_logcoef=np.full(n, -q, dtype=complex),
        diag_smooth=np.full(
            n, 0.25j * lam - (lam / (2 * math.pi)) * (math.log(lam / 2) + EULER_GAMMA)
        ),
    )
    # (i lam / 4) H0 nu . (y - y')
    b2 = KernelSplit(
        full=0.25j * lam * h0 * geo.nu_tgt_d,
        logcoef=-q * j0 * geo.nu_tgt_d + 0j,
        diag_logcoef=zero,
        diag_smooth=zero,
    )
    return NormKernels(a1=a1, b1=b1, a2=a2, b2=b2)


def helmholtz_fd_residual(
    field: Callable[[FloatArray], ComplexArray],
    z: npt.ArrayLike,
    lam: float,
    h: float,
) -> FloatArray:
    """|(Delta_h + lam^2) u| at points ``z`` with the 5-point stencil of spacing ``h``."""
    pts = np.atleast_2d(np.asarray(z, dtype=float))
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    stencil = np.concatenate([pts, pts + ex, pts - ex, pts + ey, pts - ey])
    vals = field(stencil).reshape(5, len(pts))
    lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / (h * h)
    return np.abs(lap + lam * lam * vals[0])
