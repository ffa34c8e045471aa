"""Records produced by the eigenvalue search."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from qelab.conditions import BoundaryCondition
from qelab.discretize import BoundaryGrid

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]


class NormMethod(str, Enum):
    """How the interior L2 norm of a boundary trace is computed."""

    GREEN = "green"
    POLAR = "polar"


class GridPolicy(BaseModel):
    """How the boundary grid for a spectral run is chosen."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    points_per_wavelength: float = Field(default=10.0, ge=6.0)
    nodes: int | None = Field(default=None, ge=16)
    max_nodes: int = Field(default=4096, ge=16)


class SolverOptions(BaseModel):
    """Thresholds for scanning, acceptance and auditing."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    step: float | None = Field(default=None, gt=0)
    accept_sigma: float = Field(default=1e-3, gt=0)
    bc_tolerance: float = Field(default=1e-3, gt=0)
    operator_tolerance: float = Field(default=1e-6, gt=0)
    pde_tolerance: float = Field(default=1e-4, gt=0)
    multiplicity_ratio: float = Field(default=10.0, gt=1)
    multiplicity_floor: float = Field(default=1e-6, gt=0)
    degenerate_gap: float = Field(default=1e-6, gt=0)
    xatol: float = Field(default=1e-9, gt=0)
    audit: bool = True
    strict_audit: bool = False
    norm_method: NormMethod = NormMethod.GREEN
    threads: int = Field(default=1, ge=1)
    show_progress: bool = False


@dataclass(frozen=True, eq=False)
class SpectralScan:
    """Sampled smallest singular values over a uniform lam grid."""

    lams: FloatArray
    sigmas: FloatArray
    minima: npt.NDArray[np.int64]

    @property
    def step(self) -> float:
        return float(self.lams[1] - self.lams[0]) if len(self.lams) > 1 else 0.0


@dataclass(frozen=True)
class Residuals:
    """pde_res and bc_res are relative; operator_res is ||(I - F_B) u|| / ||u||."""

    pde_res: float = float("nan")
    bc_res: float = float("nan")
    operator_res: float = float("nan")


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """Eigenvalue with its boundary trace on ``grid``.

    The trace is the boundary value of u for Neumann, Robin and Psi1-Robin
    conditions and the inward normal derivative for Dirichlet.
    """

    lam: float
    bc: BoundaryCondition
    grid: BoundaryGrid
    trace: ComplexArray
    residuals: Residuals = field(default_factory=Residuals)
    sigma_min: float = float("nan")
    cluster: int = 1
    near_degenerate: bool = False
    normalized: bool = False
    norm_flagged: bool = False
    analytic: bool = False
    index: int = 0

    @property
    def trace_norm_sq(self) -> float:
        """||u^b||^2 in L2 of the boundary."""
        return self.grid.inner(self.trace, self.trace).real

    def with_(self, **changes: object) -> Eigenpair:
        return replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True)
class WeylWindow:
    lo: float
    hi: float
    found: int
    predicted: float
    flagged: bool

    @property
    def deficit(self) -> float:
        return self.predicted - self.found


@dataclass(frozen=True)
class WeylAudit:
    windows: list[WeylWindow]
    total_found: int
    total_predicted: float

    @property
    def flagged(self) -> list[WeylWindow]:
        return [w for w in self.windows if w.flagged]

    @property
    def passed(self) -> bool:
        return not self.flagged


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Accepted eigenpairs in increasing lam, with the scan and audit behind them."""

    bc: BoundaryCondition
    grid: BoundaryGrid
    pairs: list[Eigenpair]
    lam_lo: float
    lam_hi: float
    audit: WeylAudit | None = None
    scans: list[SpectralScan] = field(default_factory=list)
    rejected: int = 0

    @property
    def lams(self) -> FloatArray:
        return np.array([p.lam for p in self.pairs])

    def __len__(self) -> int:
        return len(self.pairs)
