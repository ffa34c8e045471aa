"""Boundary grids, Nystrom assembly and symbol quantization."""

from qelab.discretize.assemble import (
    OperatorKind,
    OperatorMatrix,
    adjoint,
    assemble,
    dump_matrix,
    matrix_element,
    multiplier_matrix,
    nystrom,
)
from qelab.discretize.grid import (
    BoundaryGrid,
    Panel,
    interpolate_trace,
    kress_weights,
    make_grid,
    panel_grid,
    refine_grid,
    uniform_grid,
)
from qelab.discretize.quantize import (
    fourier_modes,
    mode_momenta,
    quantize,
    quantize_values,
)

__all__ = [
    "BoundaryGrid",
    "OperatorKind",
    "OperatorMatrix",
    "Panel",
    "adjoint",
    "assemble",
    "dump_matrix",
    "fourier_modes",
    "interpolate_trace",
    "kress_weights",
    "make_grid",
    "matrix_element",
    "mode_momenta",
    "multiplier_matrix",
    "nystrom",
    "panel_grid",
    "quantize",
    "quantize_values",
    "refine_grid",
    "uniform_grid",
]
