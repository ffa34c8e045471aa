"""Nystrom matrices for the layer operators and their boundary-condition combinations."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import numpy.typing as npt
import structlog
from scipy.linalg import circulant

from qelab.discretize.grid import MIN_PPW, BoundaryGrid
from qelab.errors import AssemblyError, UnsupportedConfigurationError
from qelab.kernels import KernelSplit, Wavenumber, e_split, f_split, multiplier_eigenvalues

log = structlog.get_logger()

ComplexArray = npt.NDArray[np.complex128]


class OperatorKind(str, Enum):
    F = "F"
    E = "E"
    FSTAR = "Fstar"
    ROBIN = "robin"
    PSI_ROBIN = "psirobin"
    K = "K"
    QUANTIZED = "quantized"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense discretised operator acting on grid samples.

    ``param`` is kappa for Robin and alpha for Psi1-Robin; ``label`` names
    the quantized symbol.
    """

    entries: ComplexArray
    lam: Wavenumber
    kind: OperatorKind
    grid: BoundaryGrid
    param: float | None = None
    label: str = ""

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: npt.ArrayLike) -> ComplexArray:
        return self.entries @ np.asarray(other)


def nystrom(split: KernelSplit, grid: BoundaryGrid) -> ComplexArray:
    """Nystrom matrix of a log-split kernel on ``grid``."""
    log_w, log_ref, diag_log = grid.log_quadrature
    k1 = split.logcoef.copy()
    np.fill_diagonal(k1, split.diag_logcoef)
    smooth = split.full - k1 * log_ref
    np.fill_diagonal(smooth, split.diag_smooth + split.diag_logcoef * diag_log)
    return log_w * k1 + smooth * grid.weights[None, :]


def adjoint(entries: ComplexArray, weights: npt.ArrayLike) -> ComplexArray:
    """Adjoint in the weighted inner product: W^-1 A^H W."""
    w = np.asarray(weights, dtype=float)
    return entries.conj().T * (w[None, :] / w[:, None])


def multiplier_matrix(alpha: float, grid: BoundaryGrid) -> ComplexArray:
    """K = alpha |D_s| as a circulant matrix on a uniform grid.

    Raises:
        UnsupportedConfigurationError: On panel grids.
    """
    if not grid.uniform:
        raise UnsupportedConfigurationError("Fourier multiplier needs a uniform grid")
    symbol = multiplier_eigenvalues(alpha, grid.n, grid.domain.length)
    column = np.fft.ifft(symbol)
    return circulant(column.real) + 0j


def _check_ppw(lam: float, grid: BoundaryGrid) -> None:
    ppw = grid.points_per_wavelength(lam)
    if ppw < MIN_PPW:
        log.warning("grid_underresolved", lam=lam, points_per_wavelength=round(ppw, 2))


def assemble(
    kind: OperatorKind | str,
    lam: float | Wavenumber,
    grid: BoundaryGrid,
    param: float | None = None,
) -> OperatorMatrix:
    """Assemble F, E, F*, the Robin combination F - kappa E, or F - E K.

    Args:
        kind: Operator to build.
        lam: Wavenumber.
        grid: Boundary grid resolving ``lam``.
        param: kappa (Robin) or alpha (Psi1-Robin, K multiplier).

    Raises:
        AssemblyError: If entries are not finite.
        UnsupportedConfigurationError: For K-based operators on panel grids.
    """
    kind = OperatorKind(kind)
    wn = lam if isinstance(lam, Wavenumber) else Wavenumber(float(lam))
    _check_ppw(wn.lam, grid)
    geo = grid.geometry

    def f_matrix() -> ComplexArray:
        return nystrom(f_split(wn.lam, geo), grid)

    def e_matrix() -> ComplexArray:
        return nystrom(e_split(wn.lam, geo), grid)

    if kind is OperatorKind.F:
        entries = f_matrix()
    elif kind is OperatorKind.E:
        entries = e_matrix()
    elif kind is OperatorKind.FSTAR:
        entries = adjoint(f_matrix(), grid.weights)
    elif kind is OperatorKind.ROBIN:
        kappa = 1.0 if param is None else float(param)
        entries = f_matrix() - kappa * e_matrix()
    elif kind is OperatorKind.PSI_ROBIN:
        alpha = 1.0 if param is None else float(param)
        entries = f_matrix() - e_matrix() @ multiplier_matrix(alpha, grid)
    elif kind is OperatorKind.K:
        entries = multiplier_matrix(1.0 if param is None else float(param), grid)
    else:
        raise UnsupportedConfigurationError("use quantize() for quantized operators")

    if not np.all(np.isfinite(entries)):
        raise AssemblyError(f"non-finite entries assembling {kind.value} at lam={wn.lam}")
    return OperatorMatrix(entries=entries, lam=wn, kind=kind, grid=grid, param=param)


def matrix_element(op: OperatorMatrix, u: npt.ArrayLike, v: npt.ArrayLike) -> complex:
    """<A u, v> = sum_i w_i (A u)_i conj(v_i).

    Raises:
        ValueError: If vector lengths do not match the grid.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != (op.n,) or v.shape != (op.n,):
        raise ValueError(f"vectors must have length {op.n}")
    return op.grid.inner(op.entries @ u, v)


def dump_matrix(op: OperatorMatrix, path: Path) -> Path:
    """Write entries as little-endian complex128, row-major."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.ascontiguousarray(op.entries, dtype="<c16").tofile(path)
    log.debug("matrix_dumped", path=str(path), n=op.n, kind=op.kind.value)
    return path
