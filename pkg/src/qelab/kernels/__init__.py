"""Special functions and Helmholtz layer kernels in the plane."""

from qelab.kernels.layers import (
    E_kernel,
    F_kernel,
    KernelSplit,
    KernelValue,
    NormKernels,
    PairGeometry,
    Wavenumber,
    double_layer_matrix,
    e_split,
    f_split,
    green0,
    green0_matrix,
    helmholtz_fd_residual,
    norm_splits,
)
from qelab.kernels.multiplier import multiplier_eigenvalues, psi_robin_symbol
from qelab.kernels.special import BesselFamily, bessel, hankel0, hankel1

__all__ = [
    "BesselFamily",
    "E_kernel",
    "F_kernel",
    "KernelSplit",
    "KernelValue",
    "NormKernels",
    "PairGeometry",
    "Wavenumber",
    "bessel",
    "double_layer_matrix",
    "e_split",
    "f_split",
    "green0",
    "green0_matrix",
    "hankel0",
    "hankel1",
    "helmholtz_fd_residual",
    "multiplier_eigenvalues",
    "norm_splits",
    "psi_robin_symbol",
]
