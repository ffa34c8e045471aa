"""Kohn-Nirenberg quantization of boundary symbols on uniform grids."""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from qelab.classical.symbols import Symbol
from qelab.discretize.assemble import OperatorKind, OperatorMatrix
from qelab.discretize.grid import BoundaryGrid
from qelab.errors import UnsupportedConfigurationError
from qelab.kernels import Wavenumber

ComplexArray = npt.NDArray[np.complex128]


def fourier_modes(n: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """Modes -n/2..n/2 with half weight on the two Nyquist modes."""
    m = np.arange(-(n // 2), n // 2 + 1)
    weight = np.ones(len(m))
    if n % 2 == 0:
        weight[0] = weight[-1] = 0.5
    else:
        m, weight = m[:-1], weight[:-1]
    return m, weight


def quantize_values(
    values: npt.ArrayLike, grid: BoundaryGrid
) -> ComplexArray:
    """Matrix with symbol samples ``values[i, k]`` at (s_i, mode k).

    A_ij = (1/N) sum_m a(s_i, eta_m) exp(2 pi i m (s_i - s_j) / L)
    """
    n = grid.n
    m, weight = fourier_modes(n)
    phase = np.exp(2j * math.pi * np.outer(grid.s, m) / grid.domain.length)
    a = np.asarray(values) * weight[None, :]
    return (a * phase) @ phase.conj().T / n


def mode_momenta(lam: float, grid: BoundaryGrid) -> npt.NDArray[np.float64]:
    """eta_m = h 2 pi m / L for the quantization modes."""
    m, _ = fourier_modes(grid.n)
    return (2.0 * math.pi / (lam * grid.domain.length)) * m


def quantize(a: Symbol, lam: float | Wavenumber, grid: BoundaryGrid) -> OperatorMatrix:
    """Op_h(a) with h = 1 / lam.

    On panel grids only multiplication symbols a(s) are supported and
    become diagonal matrices.

    Raises:
        UnsupportedConfigurationError: For eta-dependent symbols on panel grids.
    """
    wn = lam if isinstance(lam, Wavenumber) else Wavenumber(float(lam))
    if not grid.uniform:
        if a.depends_on_eta:
            raise UnsupportedConfigurationError(
                f"symbol {a.name} depends on eta; quantization needs a uniform grid"
            )
        entries = np.diag(a(grid.s, np.zeros(grid.n)))
    else:
        eta = mode_momenta(wn.lam, grid)
        S, H = np.meshgrid(grid.s, eta, indexing="ij")
        entries = quantize_values(a(S, H), grid)
    return OperatorMatrix(
        entries=entries, lam=wn, kind=OperatorKind.QUANTIZED, grid=grid, label=a.name
    )
