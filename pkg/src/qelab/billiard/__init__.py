"""Billiard map, its inverse, orbits and ergodic averages."""

from qelab.billiard.map import (
    STEP_CORNER,
    STEP_INTERIOR,
    STEP_TANGENTIAL,
    TANGENTIAL_CUTOFF,
    billiard_inverse,
    billiard_map,
    billiard_step,
    birkhoff_average,
    gamma,
    generating_check,
    ks_invariance,
    lift,
    orbit,
    orbit_ensemble,
    sample_phase_points,
)
from qelab.billiard.models import (
    BirkhoffResult,
    HitCorner,
    Interior,
    Orbit,
    OrbitEnsemble,
    PhasePoint,
    StepOutcome,
    StepStatus,
    Tangential,
)

__all__ = [
    "STEP_CORNER",
    "STEP_INTERIOR",
    "STEP_TANGENTIAL",
    "TANGENTIAL_CUTOFF",
    "BirkhoffResult",
    "HitCorner",
    "Interior",
    "Orbit",
    "OrbitEnsemble",
    "PhasePoint",
    "StepOutcome",
    "StepStatus",
    "Tangential",
    "billiard_inverse",
    "billiard_map",
    "billiard_step",
    "birkhoff_average",
    "gamma",
    "generating_check",
    "ks_invariance",
    "lift",
    "orbit",
    "orbit_ensemble",
    "sample_phase_points",
]
