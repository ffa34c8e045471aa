"""First-order tangential multiplier of the Psi1-Robin condition."""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from qelab.classical.symbols import Symbol


def psi_robin_symbol(alpha: float) -> Symbol:
    """Semiclassical symbol k(s, eta) = alpha |eta| of K = alpha |D_s|.

    Raises:
        ValueError: If ``alpha`` is negative.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    return Symbol(
        func=lambda s, eta: alpha * np.abs(eta),
        name=f"k:{alpha:g}",
        max_mode=0,
        smooth=alpha == 0,
    )


def fft_modes(n: int) -> npt.NDArray[np.int64]:
    """Integer Fourier modes in numpy FFT order for ``n`` samples."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)


def multiplier_eigenvalues(alpha: float, n: int, length: float) -> npt.NDArray[np.float64]:
    """alpha * 2 pi |m| / L for each FFT mode; the Nyquist mode counts as |n/2|."""
    return alpha * 2.0 * math.pi * np.abs(fft_modes(n)) / length
