"""Quantum ergodicity checks on computed boundary traces."""

from qelab.qe.egorov import (
    egorov_operators,
    egorov_residual,
    localize,
    probe_vectors,
    regularizer,
    residual_slope,
    transported_symbol,
)
from qelab.qe.elements import (
    accumulation_check,
    accumulation_points,
    default_windows,
    limit_states,
    matrix_elements,
    norm_limit,
    qe_variance,
    variance_decay_check,
    weyl_average,
    weyl_check,
)
from qelab.qe.identities import (
    heat_guard,
    heat_target,
    heat_trace,
    rellich_bound_check,
    rellich_check,
    rellich_norm_bound,
    support_function,
)
from qelab.qe.models import (
    CheckResult,
    EgorovRow,
    HeatMode,
    HeatRow,
    QEReport,
    QERow,
    RellichRow,
    StateWindow,
    WindowMean,
    WindowVariance,
    parse_windows,
)

__all__ = [
    "CheckResult",
    "EgorovRow",
    "HeatMode",
    "HeatRow",
    "QEReport",
    "QERow",
    "RellichRow",
    "StateWindow",
    "WindowMean",
    "WindowVariance",
    "accumulation_check",
    "accumulation_points",
    "default_windows",
    "egorov_operators",
    "egorov_residual",
    "heat_guard",
    "heat_target",
    "heat_trace",
    "limit_states",
    "localize",
    "matrix_elements",
    "norm_limit",
    "parse_windows",
    "probe_vectors",
    "qe_variance",
    "regularizer",
    "rellich_bound_check",
    "rellich_check",
    "rellich_norm_bound",
    "residual_slope",
    "support_function",
    "transported_symbol",
    "variance_decay_check",
    "weyl_average",
    "weyl_check",
]
