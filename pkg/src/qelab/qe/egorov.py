"""Numerical Egorov theorem: conjugating Op_h(a) by the boundary propagator.

For Neumann and Robin traces the propagator is F (resp. F - kappa E) and

    F* Op_h(a) F  ~  Op_h(T a),    T a = gamma / gamma o beta * a o beta,

up to O(h). Dirichlet conjugates by F* and transports backwards. The
Psi1-Robin propagator F - E K is regularised to
F^K = (I + Q)^-1 (F - E K + Q) with Q = Op_h(i k / gamma), which fixes
the same traces and transports with the k-weighted operator.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from qelab.classical import (
    MeasureKind,
    Symbol,
    eta_window,
    transfer_kind_for,
    transfer_values,
)
from qelab.conditions import BoundaryCondition, BoundaryKind
from qelab.discretize import (
    BoundaryGrid,
    OperatorKind,
    adjoint,
    assemble,
    make_grid,
    mode_momenta,
    quantize,
    quantize_values,
)
from qelab.eigensolve import GridPolicy
from qelab.errors import UnsupportedConfigurationError
from qelab.geometry import Domain
from qelab.qe.models import EgorovRow

log = structlog.get_logger()

ComplexArray = npt.NDArray[np.complex128]

ETA_SUPPORT = 0.9
TEST_ETA = 0.95
GAMMA_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class TransportedSamples:
    """Transported symbol at quantization nodes, with the corner-hit mask."""

    values: ComplexArray
    valid: npt.NDArray[np.bool_]

    @property
    def excluded_fraction(self) -> float:
        return float(1.0 - self.valid.mean()) if self.valid.size else 0.0


def localize(a: Symbol) -> Symbol:
    """Cut ``a`` off near the glancing set when it carries no eta support."""
    if a.eta_max is None:
        log.info("egorov_symbol_localised", observable=a.name, eta_support=ETA_SUPPORT)
        return a * eta_window(0.0, ETA_SUPPORT)
    if a.eta_max > ETA_SUPPORT + 1e-12:
        raise UnsupportedConfigurationError(
            f"symbol {a.name} reaches |eta| = {a.eta_max:g} > {ETA_SUPPORT}"
        )
    return a


def transported_symbol(
    kind: MeasureKind, a: Symbol, domain: Domain, s: npt.ArrayLike, eta: npt.ArrayLike
) -> TransportedSamples:
    """Transported symbol ``T_B a`` at phase points; points off |eta| < 1 give 0."""
    s = np.asarray(s, dtype=float)
    eta = np.asarray(eta, dtype=float)
    shape = s.shape
    flat_s, flat_eta = s.ravel(), eta.ravel()
    values = np.zeros(flat_s.size, dtype=complex)
    inside = np.abs(flat_eta) < 1.0
    vals, ok = transfer_values(
        transfer_kind_for(kind), a, domain, flat_s[inside], flat_eta[inside], kind.k
    )
    values[inside] = vals
    valid = np.ones(flat_s.size, dtype=bool)
    valid[inside] = ok
    return TransportedSamples(values=values.reshape(shape), valid=valid.reshape(shape))


def _propagator(bc: BoundaryCondition, lam: float, grid: BoundaryGrid) -> ComplexArray:
    if bc.kind is BoundaryKind.NEUMANN:
        return assemble(OperatorKind.F, lam, grid).entries
    if bc.kind is BoundaryKind.DIRICHLET:
        return assemble(OperatorKind.FSTAR, lam, grid).entries
    if bc.kind is BoundaryKind.ROBIN:
        return assemble(OperatorKind.ROBIN, lam, grid, bc.kappa).entries
    fk = assemble(OperatorKind.PSI_ROBIN, lam, grid, bc.alpha).entries
    q = regularizer(bc.alpha, lam, grid)
    return np.linalg.solve(np.eye(grid.n) + q, fk + q)


def regularizer(alpha: float, lam: float, grid: BoundaryGrid) -> ComplexArray:
    """Q = Op_h(i k / gamma) with k = alpha |eta| and |gamma| floored."""
    eta = mode_momenta(lam, grid)
    g = np.sqrt(1.0 - eta * eta + 0j)
    small = np.abs(g) < GAMMA_FLOOR
    g[small] = GAMMA_FLOOR * np.exp(1j * np.angle(g[small]))
    row = 1j * alpha * np.abs(eta) / g
    values = np.broadcast_to(row[None, :], (grid.n, len(eta)))
    return quantize_values(values, grid)


def probe_vectors(
    grid: BoundaryGrid, lam: float, count: int = 20, seed: int = 0
) -> ComplexArray:
    """Random trigonometric polynomials with modes |eta_m| <= 0.95 (rows)."""
    if not grid.uniform:
        raise UnsupportedConfigurationError("band-limited test vectors need a uniform grid")
    rng = np.random.default_rng(seed)
    m_max = int(math.floor(TEST_ETA * lam * grid.domain.length / (2.0 * math.pi)))
    m = np.arange(-m_max, m_max + 1)
    coef = rng.standard_normal((count, len(m))) + 1j * rng.standard_normal((count, len(m)))
    phase = np.exp(2j * math.pi * np.outer(m, grid.s) / grid.domain.length)
    return coef @ phase


def egorov_operators(
    domain: Domain, bc: BoundaryCondition, a: Symbol, lam: float, grid: BoundaryGrid
) -> tuple[ComplexArray, ComplexArray, float]:
    """``(B* Op(a) B, Op(T_B a), excluded fraction)`` at one wavenumber."""
    b = _propagator(bc, lam, grid)
    conj = adjoint(b, grid.weights) @ quantize(a, lam, grid).entries @ b
    eta = mode_momenta(lam, grid)
    S, H = np.meshgrid(grid.s, eta, indexing="ij")
    moved = transported_symbol(MeasureKind.for_condition(bc), a, domain, S, H)
    transported = quantize_values(np.where(moved.valid, moved.values, 0.0), grid)
    return conj, transported, moved.excluded_fraction


def egorov_residual(
    domain: Domain,
    bc: BoundaryCondition,
    a: Symbol,
    lams: Sequence[float],
    policy: GridPolicy | None = None,
    n_vectors: int = 20,
    seed: int = 0,
) -> list[EgorovRow]:
    """max over test vectors v of ||(B* Op(a) B - Op(T_B a)) v|| / ||v|| per lam.

    Raises:
        UnsupportedConfigurationError: On domains with corners (panel grids).
        UnsupportedConfigurationError: If ``a`` reaches beyond |eta| = 0.9.
    """
    policy = policy or GridPolicy()
    a = localize(a)
    rows = []
    for lam in lams:
        grid = make_grid(domain, policy.points_per_wavelength, lam, policy.max_nodes, policy.nodes)
        if not grid.uniform:
            raise UnsupportedConfigurationError("Egorov residuals need a corner-free domain")
        conj, transported, excluded = egorov_operators(domain, bc, a, lam, grid)
        diff = conj - transported
        worst = 0.0
        for v in probe_vectors(grid, lam, n_vectors, seed):
            worst = max(worst, grid.norm(diff @ v) / grid.norm(v))
        if excluded > 0:
            log.info("egorov_points_excluded", lam=lam, fraction=excluded)
        rows.append(EgorovRow(lam=lam, residual=worst, excluded_fraction=excluded, nodes=grid.n))
        log.debug("egorov_residual", lam=lam, residual=worst, nodes=grid.n)
    return rows


def residual_slope(rows: Sequence[EgorovRow]) -> float:
    """Least-squares slope of log residual against log lam."""
    lam = np.log([r.lam for r in rows])
    res = np.log([max(r.residual, 1e-300) for r in rows])
    return float(np.polyfit(lam, res, 1)[0])
