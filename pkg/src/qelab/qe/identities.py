"""Rellich identity and boundary heat traces."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import structlog

from qelab.classical import Symbol
from qelab.conditions import BoundaryKind
from qelab.eigensolve import Eigenpair
from qelab.errors import IncompleteSpectrumError, UnsupportedConfigurationError
from qelab.geometry import Domain, centroid
from qelab.qe.models import CheckResult, HeatMode, HeatRow, RellichRow

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

# exp(-t lam_max^2) < 1e-8
TRUNCATION_EXPONENT = 18.5

# equality holds on the disk
BOUND_SLACK = 1e-4


def support_function(pair: Eigenpair) -> FloatArray:
    """(x - centroid) . nu_out at the grid nodes."""
    grid = pair.grid
    c = centroid(grid.domain)
    # stored normals point inward
    return -np.einsum("ij,ij->i", grid.samples.position - c, grid.samples.normal)


def rellich_check(pairs: Sequence[Eigenpair]) -> list[RellichRow]:
    """Per-state relative error of 2 lam^2 = integral of (x . nu_out) |u^b|^2.

    Raises:
        UnsupportedConfigurationError: For non-Dirichlet pairs.
    """
    rows = []
    for j, p in enumerate(pairs, start=1):
        if p.bc.kind is not BoundaryKind.DIRICHLET:
            raise UnsupportedConfigurationError("the Rellich identity applies to Dirichlet traces")
        xnu = support_function(p)
        integral = float(np.sum(p.grid.weights * xnu * np.abs(p.trace) ** 2))
        target = 2.0 * p.lam**2
        rows.append(
            RellichRow(
                j=j,
                lam=p.lam,
                integral=integral,
                target=target,
                rel_error=abs(target - integral) / target,
                scaled_norm=p.trace_norm_sq / p.lam**2,
            )
        )
    return rows


def rellich_norm_bound(pair: Eigenpair) -> float:
    """2 max(x . nu) / min(x . nu); bounds lam^-2 ||u^b||^2 on star-shaped domains."""
    xnu = support_function(pair)
    lo = float(xnu.min())
    if lo <= 0:
        return math.inf
    return 2.0 * float(xnu.max()) / lo


def rellich_bound_check(pairs: Sequence[Eigenpair]) -> CheckResult:
    """Largest lam^-2 ||u^b||^2 over the states against the Rellich bound."""
    worst = max(p.trace_norm_sq / p.lam**2 for p in pairs)
    bound = rellich_norm_bound(pairs[0]) * (1.0 + BOUND_SLACK)
    return CheckResult.at_most("rellich_norm_bound", worst, bound)


def heat_guard(t: float, lam_max: float) -> None:
    """Raise when exp(-t lam_max^2) is not below 1e-8."""
    if t * lam_max**2 < TRUNCATION_EXPONENT:
        raise IncompleteSpectrumError(
            f"t = {t:g} needs eigenvalues beyond lam_max = {lam_max:g}; "
            f"use t >= {TRUNCATION_EXPONENT / lam_max**2:.4g}"
        )


def _phi_values(pair: Eigenpair, phi: Symbol | None) -> FloatArray:
    if phi is None:
        return np.ones(pair.grid.n)
    if phi.depends_on_eta:
        raise UnsupportedConfigurationError("heat traces take multiplication observables only")
    return np.real(phi(pair.grid.s, np.zeros(pair.grid.n)))


def heat_target(
    domain: Domain, t: float, mode: HeatMode, phi_integral: float | None = None
) -> float:
    """Leading small-t asymptotics: int(phi)/(2 pi t) or int(phi)/(4 pi t^2)."""
    total = domain.length if phi_integral is None else phi_integral
    if mode is HeatMode.BOUNDARY:
        return total / (2.0 * math.pi * t)
    return total / (4.0 * math.pi * t * t)


def heat_trace(
    pairs: Sequence[Eigenpair],
    t_list: Sequence[float],
    mode: HeatMode = HeatMode.BOUNDARY,
    phi: Symbol | None = None,
    lam_max: float | None = None,
) -> list[HeatRow]:
    """Truncated sums of exp(-t lam_j^2) <phi u_j^b, u_j^b> against their asymptotics.

    Boundary mode takes Neumann or Robin traces (include the constant
    Neumann mode); Dirichlet-tilde mode takes unscaled Dirichlet traces.

    Raises:
        IncompleteSpectrumError: If some t violates the truncation guard.
        UnsupportedConfigurationError: For Psi1-Robin or a mismatched mode.
    """
    if not pairs:
        raise ValueError("heat trace needs at least one eigenpair")
    kind = pairs[0].bc.kind
    if kind is BoundaryKind.PSI_ROBIN:
        raise UnsupportedConfigurationError("heat traces are not provided for Psi1-Robin")
    if (mode is HeatMode.DIRICHLET_TILDE) != (kind is BoundaryKind.DIRICHLET):
        raise UnsupportedConfigurationError(
            f"mode {mode.value} does not apply to {kind.value} traces"
        )
    top = lam_max if lam_max is not None else max(p.lam for p in pairs)
    for t in t_list:
        heat_guard(t, top)

    grid = pairs[0].grid
    phi_nodes = _phi_values(pairs[0], phi)
    phi_integral = float(np.sum(grid.weights * phi_nodes))
    lams = np.array([p.lam for p in pairs])
    rows_phi = np.array(
        [float(np.sum(p.grid.weights * phi_nodes * np.abs(p.trace) ** 2)) for p in pairs]
    )
    out = []
    for t in t_list:
        value = float(np.sum(np.exp(-t * lams**2) * rows_phi))
        target = heat_target(grid.domain, t, mode, phi_integral)
        err = abs(value - target)
        if abs(target) > 1e-12:
            err /= abs(target)
        out.append(HeatRow(t=t, value=value, target=target, rel_error=err, states=len(pairs)))
        log.debug("heat_trace_point", t=t, value=value, target=target)
    return out
