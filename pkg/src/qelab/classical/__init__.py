"""Classical symbols, limit measures and transfer operators on the coball bundle."""

from qelab.classical.symbols import (
    DEFAULT_WINDOW_WIDTH,
    Symbol,
    bump,
    const,
    eta_power,
    eta_window,
    fourier,
    from_function,
    parse_observable,
    product,
)
from qelab.classical.measures import (
    DIRICHLET,
    NEUMANN,
    MeasureKind,
    c_const,
    integrate,
    invariant_function,
    mu_density,
    omega,
    psi_robin_dirichlet_weight,
)
from qelab.classical.transfer import (
    ErgodicAverages,
    MCEstimate,
    TransferKind,
    TransferValue,
    ergodic_average,
    ergodic_averages,
    mean_ergodic_distance,
    projection_P,
    transfer_apply,
    transfer_kind_for,
    transfer_values,
    weighted_norm_mc,
)

__all__ = [
    "DEFAULT_WINDOW_WIDTH",
    "DIRICHLET",
    "NEUMANN",
    "ErgodicAverages",
    "MCEstimate",
    "MeasureKind",
    "Symbol",
    "TransferKind",
    "TransferValue",
    "bump",
    "c_const",
    "const",
    "ergodic_average",
    "ergodic_averages",
    "eta_power",
    "eta_window",
    "fourier",
    "from_function",
    "integrate",
    "invariant_function",
    "mean_ergodic_distance",
    "mu_density",
    "omega",
    "parse_observable",
    "product",
    "projection_P",
    "psi_robin_dirichlet_weight",
    "transfer_apply",
    "transfer_kind_for",
    "transfer_values",
    "weighted_norm_mc",
]
