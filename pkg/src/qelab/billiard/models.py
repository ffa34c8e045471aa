"""Phase-space points and step outcomes for the billiard map."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import numpy.typing as npt


class StepStatus(str, Enum):
    """How a billiard step (or an orbit) ended."""

    INTERIOR = "interior"
    CORNER = "corner"
    TANGENTIAL = "tangential"
    COMPLETED = "completed"


@dataclass(frozen=True)
class PhasePoint:
    """Point (s, eta) of the coball bundle: arclength and tangential momentum."""

    s: float
    eta: float


@dataclass(frozen=True)
class Interior:
    point: PhasePoint
    status: StepStatus = StepStatus.INTERIOR


@dataclass(frozen=True)
class HitCorner:
    s: float
    status: StepStatus = StepStatus.CORNER


@dataclass(frozen=True)
class Tangential:
    status: StepStatus = StepStatus.TANGENTIAL


StepOutcome = Interior | HitCorner | Tangential


@dataclass(frozen=True)
class Orbit:
    """Iterates ``q_0, ..., q_n`` and why the orbit stopped.

    ``steps`` counts completed map applications; it is below the request
    when the orbit hit a corner or went tangential.
    """

    points: list[PhasePoint]
    reason: StepStatus
    steps: int
    corner_s: float | None = None

    @property
    def s(self) -> npt.NDArray[np.float64]:
        return np.array([p.s for p in self.points])

    @property
    def eta(self) -> npt.NDArray[np.float64]:
        return np.array([p.eta for p in self.points])


@dataclass(frozen=True, eq=False)
class OrbitEnsemble:
    """Vectorised orbits: arrays of shape (steps + 1, n_starts), nan after death."""

    s: npt.NDArray[np.float64]
    eta: npt.NDArray[np.float64]
    survived: npt.NDArray[np.int64] = field(repr=False)

    @property
    def n_starts(self) -> int:
        return self.s.shape[1]

    @property
    def survival_fraction(self) -> float:
        n_steps = self.s.shape[0] - 1
        return float(np.mean(self.survived == n_steps)) if n_steps else 1.0


@dataclass(frozen=True)
class BirkhoffResult:
    value: complex
    steps: int
    requested: int

    @property
    def truncated(self) -> bool:
        return self.steps < self.requested
