"""Weyl counting, completeness audits and analytic disk spectra."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog
from scipy import optimize, special

from qelab.conditions import BoundaryCondition, BoundaryKind
from qelab.eigensolve.models import WeylAudit, WeylWindow
from qelab.geometry import Domain

log = structlog.get_logger()

WINDOW_TARGET = 20.0
ABS_TOLERANCE = 3.0
REL_TOLERANCE = 0.05


def weyl_count(
    domain: Domain, bc: BoundaryCondition, lam: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Two-term count A lam^2 / 4 pi -+ L lam / 4 pi (minus for Dirichlet)."""
    lam = np.asarray(lam, dtype=float)
    sign = -1.0 if bc.is_dirichlet else 1.0
    return domain.area * lam**2 / (4 * math.pi) + sign * domain.length * lam / (4 * math.pi)


def mean_spacing(domain: Domain, lam: float) -> float:
    """Mean eigenvalue spacing 2 pi / (A lam) from the leading Weyl term."""
    return 2.0 * math.pi / (domain.area * lam)


def default_step(domain: Domain, lam: float) -> float:
    """Quarter of the mean spacing: 0.25 * 4 pi / (A lam)."""
    return 0.25 * 4.0 * math.pi / (domain.area * lam)


def window_edges(
    domain: Domain, bc: BoundaryCondition, lam_lo: float, lam_hi: float
) -> list[float]:
    """Edges of audit windows holding about 20 predicted eigenvalues each."""
    edges = [lam_lo]
    grid = np.linspace(lam_lo, lam_hi, 2000)
    counts = weyl_count(domain, bc, grid)
    base = float(weyl_count(domain, bc, lam_lo))
    for lam, c in zip(grid, counts, strict=True):
        if c - base >= WINDOW_TARGET and lam_hi - lam > 1e-12:
            edges.append(float(lam))
            base = float(c)
    tail = weyl_count(domain, bc, lam_hi) - weyl_count(domain, bc, edges[-1])
    if len(edges) > 1 and tail < WINDOW_TARGET / 2:
        edges.pop()
    edges.append(lam_hi)
    return edges


def audit_weyl(
    domain: Domain,
    bc: BoundaryCondition,
    found: Sequence[float],
    lam_lo: float,
    lam_hi: float,
) -> WeylAudit:
    """Compare found eigenvalues (listed with multiplicity) with the two-term count per window.

    A window is flagged when the counts differ by more than max(3, 5%).
    """
    lams = np.sort(np.asarray(found, dtype=float))
    windows = []
    edges = window_edges(domain, bc, lam_lo, lam_hi)
    for lo, hi in zip(edges[:-1], edges[1:], strict=True):
        n_found = int(np.sum((lams > lo) & (lams <= hi)))
        predicted = float(weyl_count(domain, bc, hi) - weyl_count(domain, bc, lo))
        tol = max(ABS_TOLERANCE, REL_TOLERANCE * predicted)
        flagged = abs(n_found - predicted) > tol
        if flagged:
            log.info(
                "weyl_window_flagged", lo=lo, hi=hi, found=n_found, predicted=round(predicted, 2)
            )
        windows.append(
            WeylWindow(lo=lo, hi=hi, found=n_found, predicted=predicted, flagged=flagged)
        )
    total_pred = float(weyl_count(domain, bc, lam_hi) - weyl_count(domain, bc, lam_lo))
    return WeylAudit(windows=windows, total_found=len(lams), total_predicted=total_pred)


@dataclass(frozen=True)
class DiskMode:
    lam: float
    m: int
    multiplicity: int


def _robin_roots(m: int, coef: float, lam_hi: float, step: float = 2e-3) -> list[float]:
    """Roots of lam J_m'(lam) + coef J_m(lam) in (0, lam_hi]."""

    def f(x: float) -> float:
        return float(x * special.jvp(m, x) + coef * special.jv(m, x))

    xs = np.arange(step, lam_hi + step, step)
    vals = xs * special.jvp(m, xs) + coef * special.jv(m, xs)
    roots = []
    for k in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
        root = optimize.brentq(f, xs[k], xs[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if root <= lam_hi:
            roots.append(float(root))
    return roots


def _bessel_zeros(m: int, lam_hi: float, derivative: bool) -> list[float]:
    count = 4
    fn = special.jnp_zeros if derivative else special.jn_zeros
    while True:
        zeros = fn(m, count)
        if zeros[-1] > lam_hi:
            return [float(z) for z in zeros if z <= lam_hi]
        count *= 2


def oracle_disk_eigenvalues(
    bc: BoundaryCondition, lam_hi: float, radius: float = 1.0
) -> list[DiskMode]:
    """Eigenvalues of the disk of given radius up to ``lam_hi``, sorted, with multiplicities.

    Neumann omits the constant mode lam = 0. Robin solves
    ``-x J_m'(x) = kappa R J_m(x)`` and Psi1-Robin ``-x J_m'(x) = alpha |m| J_m(x)``
    (inward normal derivative) in x = lam R, then scales by 1 / R.
    """
    hi = lam_hi * radius
    modes: list[DiskMode] = []
    m = 0
    while True:
        if bc.kind is BoundaryKind.DIRICHLET:
            roots = _bessel_zeros(m, hi, derivative=False)
        elif bc.kind is BoundaryKind.NEUMANN:
            roots = _bessel_zeros(m, hi, derivative=True)
        elif bc.kind is BoundaryKind.ROBIN:
            roots = _robin_roots(m, bc.kappa * radius, hi)
        else:
            roots = _robin_roots(m, bc.alpha * m, hi)
        if not roots and m > hi:
            break
        mult = 1 if m == 0 else 2
        modes.extend(DiskMode(lam=r / radius, m=m, multiplicity=mult) for r in roots)
        m += 1
    return sorted(modes, key=lambda d: d.lam)


def expand_multiplicity(modes: Sequence[DiskMode]) -> list[float]:
    out: list[float] = []
    for d in modes:
        out.extend([d.lam] * d.multiplicity)
    return out
