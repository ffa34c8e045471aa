"""Report rows, windows and check results for the QE harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from qelab.conditions import BoundaryCondition

FloatArray = npt.NDArray[np.float64]


class StateWindow(BaseModel):
    """Inclusive 1-based range of state indices."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=1)
    stop: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> StateWindow:
        if self.stop < self.start:
            raise ValueError(f"window {self.start}-{self.stop} is empty")
        return self

    @property
    def label(self) -> str:
        return f"{self.start}-{self.stop}"

    def take(self, values: FloatArray) -> FloatArray:
        return values[self.start - 1 : self.stop]


def parse_windows(text: str) -> list[StateWindow]:
    """Parse ``"1-25,26-100"`` into windows.

    Raises:
        ValueError: On malformed ranges.
    """
    windows = []
    for part in text.split(","):
        lo, sep, hi = part.strip().partition("-")
        if not sep:
            raise ValueError(f"window '{part}' must look like start-stop")
        windows.append(StateWindow(start=int(lo), stop=int(hi)))
    return windows


class QERow(BaseModel):
    """One state's matrix element.

    ``rho`` and ``trace_norm_sq`` carry the lam^-2 factor for Dirichlet.
    """

    model_config = ConfigDict(frozen=True)

    j: int
    lam: float
    rho: float
    rho_imag: float = 0.0
    trace_norm_sq: float

    @property
    def normalized(self) -> float:
        return self.rho / self.trace_norm_sq


@dataclass(frozen=True, eq=False)
class QEReport:
    """Matrix elements of one observable over a spectrum, in increasing lam."""

    bc: BoundaryCondition
    observable: str
    rows: list[QERow]
    target: float
    target_identity: float
    complete: bool = True
    windows: list[StateWindow] = field(default_factory=list)

    def column(self, name: str) -> FloatArray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def lams(self) -> FloatArray:
        return self.column("lam")

    @property
    def rho(self) -> FloatArray:
        return self.column("rho")

    @property
    def norms(self) -> FloatArray:
        return self.column("trace_norm_sq")

    @property
    def normalized(self) -> FloatArray:
        return self.rho / self.norms

    @property
    def ratio(self) -> float:
        """omega_B(a) / omega_B(1), the limit of the normalised elements."""
        return self.target / self.target_identity

    def cesaro(self) -> FloatArray:
        """Running mean of the rows."""
        return np.cumsum(self.rho) / np.arange(1, len(self.rows) + 1)

    def running_variance(self) -> FloatArray:
        """Running mean square deviation of the normalised elements from the ratio."""
        dev = (self.normalized - self.ratio) ** 2
        return np.cumsum(dev) / np.arange(1, len(self.rows) + 1)


class WindowMean(BaseModel):
    window: str
    count: int
    mean: float
    stderr: float


class WindowVariance(BaseModel):
    """``variance`` uses normalised traces; ``raw_variance`` the unnormalised elements."""

    window: str
    count: int
    variance: float
    raw_variance: float


class RellichRow(BaseModel):
    j: int
    lam: float
    integral: float
    target: float
    rel_error: float
    scaled_norm: float


class HeatMode(str, Enum):
    BOUNDARY = "boundary"
    DIRICHLET_TILDE = "dirichlet-tilde"


class HeatRow(BaseModel):
    t: float
    value: float
    target: float
    rel_error: float
    states: int


class EgorovRow(BaseModel):
    lam: float
    residual: float
    excluded_fraction: float
    nodes: int


class CheckResult(BaseModel):
    """Outcome of one acceptance check, written to the JSON summary."""

    name: str
    value: float
    target: float
    tolerance: float
    passed: bool

    @classmethod
    def relative(cls, name: str, value: float, target: float, tolerance: float) -> CheckResult:
        err = abs(value - target) / abs(target) if abs(target) > 1e-12 else abs(value - target)
        passed = bool(err <= tolerance)
        return cls(name=name, value=value, target=target, tolerance=tolerance, passed=passed)

    @classmethod
    def absolute(cls, name: str, value: float, target: float, tolerance: float) -> CheckResult:
        ok = abs(value - target) <= tolerance
        return cls(name=name, value=value, target=target, tolerance=tolerance, passed=bool(ok))

    @classmethod
    def at_most(cls, name: str, value: float, bound: float) -> CheckResult:
        return cls(name=name, value=value, target=bound, tolerance=0.0, passed=bool(value <= bound))

    @classmethod
    def at_least(cls, name: str, value: float, bound: float) -> CheckResult:
        return cls(name=name, value=value, target=bound, tolerance=0.0, passed=bool(value >= bound))
