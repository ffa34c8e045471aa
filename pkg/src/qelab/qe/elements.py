"""Matrix elements of quantized observables and their windowed statistics."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import structlog
from scipy import stats

from qelab.classical import MeasureKind, Symbol, const, omega
from qelab.conditions import BoundaryCondition
from qelab.discretize import matrix_element, quantize
from qelab.eigensolve import Eigenpair, WeylAudit
from qelab.errors import AuditError
from qelab.qe.models import (
    CheckResult,
    QEReport,
    QERow,
    StateWindow,
    WindowMean,
    WindowVariance,
)

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

KDE_BANDWIDTH = 0.05
PEAK_FRACTION = 0.1


def limit_states(
    bc: BoundaryCondition, a: Symbol, pairs: Sequence[Eigenpair]
) -> tuple[float, float]:
    """omega_B(a) and omega_B(1) on the pairs' domain."""
    domain = pairs[0].grid.domain
    kind = MeasureKind.for_condition(bc)
    return float(omega(kind, a, domain).real), float(omega(kind, const(), domain).real)


def _audit_complete(audit: WeylAudit | None) -> bool:
    if audit is None:
        return True
    return not any(w.deficit > max(3.0, 0.05 * w.predicted) for w in audit.flagged)


def matrix_elements(
    pairs: Sequence[Eigenpair],
    a: Symbol,
    audit: WeylAudit | None = None,
) -> QEReport:
    """rho_j = <Op_{h_j}(a) u_j, u_j> with h_j = 1 / lam_j for each state.

    Dirichlet rows (and their trace norms) are scaled by lam_j^-2. The
    constant Neumann mode has no semiclassical parameter and is skipped.

    Raises:
        UnsupportedConfigurationError: eta-dependent ``a`` on a panel grid.
    """
    states = [p for p in pairs if p.lam > 0]
    if not states:
        raise ValueError("no eigenpairs with lam > 0")
    bc = states[0].bc
    rows = []
    for j, p in enumerate(states, start=1):
        op = quantize(a, p.lam, p.grid)
        rho = matrix_element(op, p.trace, p.trace)
        norm = p.trace_norm_sq
        scale = p.lam**-2 if bc.is_dirichlet else 1.0
        rows.append(
            QERow(
                j=j,
                lam=p.lam,
                rho=scale * rho.real,
                rho_imag=scale * rho.imag,
                trace_norm_sq=scale * norm,
            )
        )
    if a.real and max(abs(r.rho_imag) for r in rows) > 1e-8 * max(abs(r.rho) for r in rows):
        log.warning("matrix_element_not_real", observable=a.name)
    target, ident = limit_states(bc, a, states)
    log.debug("matrix_elements_done", observable=a.name, states=len(rows), target=target)
    return QEReport(
        bc=bc,
        observable=a.name,
        rows=rows,
        target=target,
        target_identity=ident,
        complete=_audit_complete(audit),
    )


def weyl_average(report: QEReport, lam_cut: float) -> float:
    """Cesaro mean of the rows with lam_j <= lam_cut.

    Raises:
        AuditError: If the spectrum behind the report failed its audit.
        ValueError: If no state lies below ``lam_cut``.
    """
    if not report.complete:
        raise AuditError("spectrum is missing eigenvalues; local Weyl average withheld")
    rho = report.rho[report.lams <= lam_cut]
    if not len(rho):
        raise ValueError(f"no states with lam <= {lam_cut}")
    return float(np.mean(rho))


def weyl_check(report: QEReport, lam_cut: float, tolerance: float = 0.15) -> CheckResult:
    value = weyl_average(report, lam_cut)
    name = f"weyl_average[{report.observable}]"
    if abs(report.target) < 1e-12:
        return CheckResult.absolute(name, value, report.target, tolerance * report.target_identity)
    return CheckResult.relative(name, value, report.target, tolerance)


def default_windows(count: int) -> list[StateWindow]:
    """States 1-25 and 26-count (or halves for short reports)."""
    if count >= 50:
        return [StateWindow(start=1, stop=25), StateWindow(start=26, stop=count)]
    half = max(1, count // 2)
    if half == count:
        return [StateWindow(start=1, stop=count)]
    return [StateWindow(start=1, stop=half), StateWindow(start=half + 1, stop=count)]


def _clip(window: StateWindow, count: int) -> StateWindow | None:
    if window.start > count:
        log.warning("window_empty", window=window.label, states=count)
        return None
    return StateWindow(start=window.start, stop=min(window.stop, count))


def qe_variance(report: QEReport, windows: Sequence[StateWindow]) -> list[WindowVariance]:
    """Mean square deviation of rho_j / ||u_j||^2 from omega(a) / omega(1) per window.

    ``raw_variance`` is the mean of |rho_j - ratio ||u_j||^2|^2.
    """
    n = len(report.rows)
    ratio = report.ratio
    out = []
    for w in windows:
        clipped = _clip(w, n)
        if clipped is None:
            continue
        rho = clipped.take(report.rho)
        norms = clipped.take(report.norms)
        out.append(
            WindowVariance(
                window=clipped.label,
                count=len(rho),
                variance=float(np.mean((rho / norms - ratio) ** 2)),
                raw_variance=float(np.mean((rho - ratio * norms) ** 2)),
            )
        )
    return out


def norm_limit(report: QEReport, windows: Sequence[StateWindow]) -> list[WindowMean]:
    """Windowed means of ||u_j^b||^2 (lam^-2 scaled for Dirichlet) with standard errors."""
    n = len(report.rows)
    out = []
    for w in windows:
        clipped = _clip(w, n)
        if clipped is None:
            continue
        norms = clipped.take(report.norms)
        err = float(np.std(norms, ddof=1) / np.sqrt(len(norms))) if len(norms) > 1 else float("nan")
        mean = float(np.mean(norms))
        out.append(WindowMean(window=clipped.label, count=len(norms), mean=mean, stderr=err))
    return out


def accumulation_points(
    values: npt.ArrayLike,
    bandwidth: float = KDE_BANDWIDTH,
    peak_fraction: float = PEAK_FRACTION,
) -> list[float]:
    """Peaks of a Gaussian kernel density estimate of ``values``.

    Local maxima at least ``peak_fraction`` of the tallest are returned
    in increasing order.
    """
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return []
    spread = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
    if spread < 1e-12:
        return [float(np.mean(x))]
    kde = stats.gaussian_kde(x, bw_method=bandwidth / spread)
    grid = np.linspace(x.min() - 3 * bandwidth, x.max() + 3 * bandwidth, 2048)
    dens = kde(grid)
    inner = (dens[1:-1] > dens[:-2]) & (dens[1:-1] >= dens[2:])
    peaks = np.flatnonzero(inner) + 1
    peaks = peaks[dens[peaks] >= peak_fraction * dens.max()]
    return [float(grid[k]) for k in peaks]


def variance_decay_check(
    report: QEReport, early: StateWindow, late: StateWindow, factor: float = 2.0
) -> CheckResult:
    """Late-window variance at most 1/factor of the early one.

    Fails with value inf when either window holds no states.
    """
    name = f"variance_decay[{report.observable}]"
    windows = qe_variance(report, [early, late])
    if len(windows) < 2:
        return CheckResult.at_most(name, math.inf, 1.0 / factor)
    first, second = windows
    if first.variance < 1e-24:
        ratio = 0.0 if second.variance < 1e-24 else float("inf")
    else:
        ratio = second.variance / first.variance
    return CheckResult.at_most(name, ratio, 1.0 / factor)


def accumulation_check(report: QEReport, separation: float = 0.1) -> CheckResult:
    """At least two accumulation points of the normalised elements, ``separation`` apart."""
    points = accumulation_points(report.normalized)
    spread = max(points) - min(points) if len(points) > 1 else 0.0
    return CheckResult.at_least(f"accumulation[{report.observable}]", spread, separation)
