"""Boundary-integral eigenvalue search, traces and interior normalisation."""

from qelab.eigensolve.field import (
    bc_residual,
    boundary_data,
    evaluate_field,
    green_gram,
    interior_field,
    interior_gram,
    normalize_interior,
    orthonormalize,
    pde_residual,
    polar_gram,
)
from qelab.eigensolve.interior import (
    InteriorQuadrature,
    interior_quadrature,
    is_star_shaped,
    polar_quadrature,
    tensor_quadrature,
)
from qelab.eigensolve.models import (
    Eigenpair,
    GridPolicy,
    NormMethod,
    Residuals,
    SolverOptions,
    SpectralScan,
    Spectrum,
    WeylAudit,
    WeylWindow,
)
from qelab.eigensolve.solver import (
    characteristic_matrix,
    group_clusters,
    grid_for,
    neumann_zero_mode,
    null_traces,
    operator_residual,
    scan,
    scan_and_refine,
    sigma_min,
    singular_values,
    solve_spectrum,
)
from qelab.eigensolve.weyl import (
    DiskMode,
    audit_weyl,
    default_step,
    expand_multiplicity,
    mean_spacing,
    oracle_disk_eigenvalues,
    weyl_count,
)

__all__ = [
    "DiskMode",
    "Eigenpair",
    "GridPolicy",
    "InteriorQuadrature",
    "NormMethod",
    "Residuals",
    "SolverOptions",
    "SpectralScan",
    "Spectrum",
    "WeylAudit",
    "WeylWindow",
    "audit_weyl",
    "bc_residual",
    "boundary_data",
    "characteristic_matrix",
    "default_step",
    "evaluate_field",
    "expand_multiplicity",
    "green_gram",
    "grid_for",
    "group_clusters",
    "interior_field",
    "interior_gram",
    "interior_quadrature",
    "is_star_shaped",
    "mean_spacing",
    "neumann_zero_mode",
    "normalize_interior",
    "null_traces",
    "operator_residual",
    "oracle_disk_eigenvalues",
    "orthonormalize",
    "pde_residual",
    "polar_gram",
    "polar_quadrature",
    "scan",
    "scan_and_refine",
    "sigma_min",
    "singular_values",
    "solve_spectrum",
    "tensor_quadrature",
    "weyl_count",
]
