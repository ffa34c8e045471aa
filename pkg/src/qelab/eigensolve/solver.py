"""Eigenvalue search by scanning the smallest singular value of I -+ F_B.

Every boundary condition reduces to a characteristic matrix whose null
space holds the boundary traces:

    Neumann     I - F
    Dirichlet   I + F*
    Robin       I - (F - kappa E)
    Psi1-Robin  I - (F - E K)

Minima of sigma_min over a lam grid are refined, their null vectors are
extracted, and candidates whose Green representation does not vanish
outside the domain are discarded.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import numpy.typing as npt
import structlog
from scipy import linalg, optimize
from tqdm import tqdm

from qelab.conditions import BoundaryCondition, BoundaryKind
from qelab.discretize import BoundaryGrid, OperatorKind, OperatorMatrix, assemble, make_grid
from qelab.eigensolve.field import bc_residual, orthonormalize, pde_residual
from qelab.eigensolve.models import (
    Eigenpair,
    GridPolicy,
    Residuals,
    SolverOptions,
    SpectralScan,
    Spectrum,
)
from qelab.eigensolve.weyl import audit_weyl, default_step
from qelab.errors import MissingEigenvalueError
from qelab.geometry import Domain
from qelab.kernels import Wavenumber

log = structlog.get_logger()

ComplexArray = npt.NDArray[np.complex128]

DUPLICATE_GAP = 1e-7


def characteristic_matrix(bc: BoundaryCondition, lam: float, grid: BoundaryGrid) -> OperatorMatrix:
    """Matrix whose kernel at an eigenvalue holds the boundary traces.

    Raises:
        AssemblyError: Propagated from assembly.
        UnsupportedConfigurationError: Psi1-Robin on a panel grid.
    """
    eye = np.eye(grid.n, dtype=complex)
    if bc.kind is BoundaryKind.NEUMANN:
        op = assemble(OperatorKind.F, lam, grid)
        entries = eye - op.entries
    elif bc.kind is BoundaryKind.DIRICHLET:
        op = assemble(OperatorKind.FSTAR, lam, grid)
        entries = eye + op.entries
    elif bc.kind is BoundaryKind.ROBIN:
        op = assemble(OperatorKind.ROBIN, lam, grid, bc.kappa)
        entries = eye - op.entries
    else:
        op = assemble(OperatorKind.PSI_ROBIN, lam, grid, bc.alpha)
        entries = eye - op.entries
    return OperatorMatrix(
        entries=entries,
        lam=Wavenumber(lam),
        kind=op.kind,
        grid=grid,
        param=op.param,
        label=bc.label,
    )


def _balanced(matrix: OperatorMatrix) -> ComplexArray:
    """D M D^-1 with D = diag(sqrt(w)), so singular values live in L2 of the boundary."""
    d = np.sqrt(matrix.grid.weights)
    return d[:, None] * matrix.entries / d[None, :]


def singular_values(matrix: OperatorMatrix) -> npt.NDArray[np.float64]:
    """Singular values in decreasing order, measured in the boundary L2 norm."""
    return linalg.svdvals(_balanced(matrix))


def sigma_min(bc: BoundaryCondition, lam: float, grid: BoundaryGrid) -> float:
    return float(singular_values(characteristic_matrix(bc, lam, grid))[-1])


def null_traces(
    matrix: OperatorMatrix, options: SolverOptions
) -> tuple[npt.NDArray[np.float64], ComplexArray]:
    """Near-null singular values and their grid vectors (rows).

    The multiplicity is the number of singular values below
    ``max(multiplicity_ratio * sigma_min, multiplicity_floor)``.
    """
    _, s, vh = linalg.svd(_balanced(matrix))
    threshold = max(options.multiplicity_ratio * s[-1], options.multiplicity_floor)
    count = max(1, int(np.sum(s < threshold)))
    vecs = vh[-count:].conj() / np.sqrt(matrix.grid.weights)[None, :]
    return s[-count:][::-1], vecs[::-1]


def operator_residual(pair: Eigenpair) -> float:
    """||(I -+ F_B) u|| / ||u|| in L2 of the boundary."""
    if pair.analytic:
        return 0.0
    m = characteristic_matrix(pair.bc, pair.lam, pair.grid)
    return pair.grid.norm(m @ pair.trace) / pair.grid.norm(pair.trace)


def _local_minima(sigmas: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    left = sigmas[1:-1] <= sigmas[:-2]
    right = sigmas[1:-1] < sigmas[2:]
    return np.flatnonzero(left & right) + 1


def scan(
    bc: BoundaryCondition,
    grid: BoundaryGrid,
    lam_lo: float,
    lam_hi: float,
    step: float,
    threads: int = 1,
    show_progress: bool = False,
) -> SpectralScan:
    """Sample sigma_min on a uniform grid padded by one step on each side."""
    n = max(3, math.ceil((lam_hi - lam_lo) / step) + 3)
    lams = lam_lo - step + step * np.arange(n)
    lams = lams[lams > 0]

    def one(lam: float) -> float:
        return sigma_min(bc, float(lam), grid)

    bar = tqdm(total=len(lams), desc=f"scan {bc.label}", unit="lam", disable=not show_progress)
    with bar, ThreadPoolExecutor(max_workers=threads) as pool:
        sigmas = []
        for value in pool.map(one, lams):
            sigmas.append(value)
            bar.update()
    sigmas_arr = np.asarray(sigmas)
    minima = _local_minima(sigmas_arr)
    log.debug("scan_done", bc=bc.label, points=len(lams), minima=len(minima), step=step)
    return SpectralScan(lams=lams, sigmas=sigmas_arr, minima=minima)


def _refine(
    bc: BoundaryCondition, grid: BoundaryGrid, lo: float, hi: float, options: SolverOptions
) -> tuple[float, float]:
    res = optimize.minimize_scalar(
        lambda x: sigma_min(bc, float(x), grid),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": options.xatol},
    )
    return float(res.x), float(res.fun)


def _candidates_at(
    bc: BoundaryCondition, grid: BoundaryGrid, lam: float, options: SolverOptions
) -> list[Eigenpair]:
    matrix = characteristic_matrix(bc, lam, grid)
    sigmas, vecs = null_traces(matrix, options)
    pairs = []
    for sigma, vec in zip(sigmas, vecs, strict=True):
        pair = Eigenpair(
            lam=lam, bc=bc, grid=grid, trace=vec, sigma_min=float(sigma), cluster=len(sigmas)
        )
        res = Residuals(bc_res=bc_residual(pair))
        pairs.append(pair.with_(residuals=res))
    return pairs


def _search(
    bc: BoundaryCondition,
    grid: BoundaryGrid,
    lam_lo: float,
    lam_hi: float,
    step: float,
    options: SolverOptions,
) -> tuple[list[Eigenpair], SpectralScan]:
    sc = scan(bc, grid, lam_lo, lam_hi, step, options.threads, options.show_progress)
    refined: list[tuple[float, float]] = []
    for k in sc.minima:
        lam, sigma = _refine(bc, grid, float(sc.lams[k - 1]), float(sc.lams[k + 1]), options)
        if not lam_lo < lam <= lam_hi:
            continue
        if sigma > options.accept_sigma:
            log.debug("minimum_rejected", lam=lam, sigma=sigma)
            continue
        if refined and abs(lam - refined[-1][0]) < DUPLICATE_GAP:
            if sigma < refined[-1][1]:
                refined[-1] = (lam, sigma)
            continue
        refined.append((lam, sigma))
    candidates = [p for lam, _ in refined for p in _candidates_at(bc, grid, lam, options)]
    return candidates, sc


def grid_for(domain: Domain, lam_hi: float, policy: GridPolicy) -> BoundaryGrid:
    return make_grid(domain, policy.points_per_wavelength, lam_hi, policy.max_nodes, policy.nodes)


def _check_range(lam_lo: float, lam_hi: float) -> None:
    if lam_lo <= 0 or lam_hi <= lam_lo:
        raise ValueError(f"need 0 < lam_lo < lam_hi, got [{lam_lo}, {lam_hi}]")


def scan_and_refine(
    domain: Domain,
    bc: BoundaryCondition,
    lam_lo: float,
    lam_hi: float,
    policy: GridPolicy | None = None,
    options: SolverOptions | None = None,
) -> list[Eigenpair]:
    """Candidate eigenpairs in (lam_lo, lam_hi], one per singular direction.

    Candidates carry sigma_min, their cluster size and bc_res but are not
    filtered or normalised.
    """
    _check_range(lam_lo, lam_hi)
    policy = policy or GridPolicy()
    options = options or SolverOptions()
    grid = grid_for(domain, lam_hi, policy)
    step = options.step or default_step(domain, lam_hi)
    return _search(bc, grid, lam_lo, lam_hi, step, options)[0]


def _accept(candidates: Iterable[Eigenpair], options: SolverOptions) -> tuple[list[Eigenpair], int]:
    kept = []
    rejected = 0
    for p in candidates:
        bc_res = p.residuals.bc_res
        if np.isfinite(bc_res) and bc_res < options.bc_tolerance:
            kept.append(p)
        else:
            rejected += 1
            log.info("spurious_root_rejected", lam=p.lam, bc_res=bc_res)
    return kept, rejected


def group_clusters(pairs: Sequence[Eigenpair], gap: float) -> list[list[Eigenpair]]:
    """Split pairs sorted by lam into runs whose consecutive gaps are below ``gap``."""
    groups: list[list[Eigenpair]] = []
    for p in sorted(pairs, key=lambda q: q.lam):
        if groups and p.lam - groups[-1][-1].lam < gap:
            groups[-1].append(p)
        else:
            groups.append([p])
    return groups


def _finish(
    clusters: list[list[Eigenpair]], options: SolverOptions
) -> tuple[list[Eigenpair], int]:
    """Normalise clusters and drop pairs whose operator or PDE residual is too large."""
    out = []
    dropped = 0
    for group in clusters:
        near = len({p.lam for p in group}) > 1
        if near:
            log.warning("near_degenerate", lams=[p.lam for p in group])
        for p in orthonormalize(group, options.norm_method):
            op_res = operator_residual(p)
            pde_res = pde_residual(p)
            if op_res > options.operator_tolerance or not pde_res < options.pde_tolerance:
                log.warning("eigenpair_dropped", lam=p.lam, operator_res=op_res, pde_res=pde_res)
                dropped += 1
                continue
            res = Residuals(pde_res=pde_res, bc_res=p.residuals.bc_res, operator_res=op_res)
            out.append(p.with_(residuals=res, cluster=len(group), near_degenerate=near))
    return [p.with_(index=k + 1) for k, p in enumerate(out)], dropped


def neumann_zero_mode(grid: BoundaryGrid) -> Eigenpair:
    """The constant Neumann eigenfunction 1/sqrt(A) at lam = 0."""
    value = 1.0 / math.sqrt(grid.domain.area)
    return Eigenpair(
        lam=0.0,
        bc=BoundaryCondition.neumann(),
        grid=grid,
        trace=np.full(grid.n, value, dtype=complex),
        residuals=Residuals(pde_res=0.0, bc_res=0.0, operator_res=0.0),
        sigma_min=0.0,
        normalized=True,
        analytic=True,
    )


def solve_spectrum(
    domain: Domain,
    bc: BoundaryCondition,
    lam_lo: float,
    lam_hi: float,
    policy: GridPolicy | None = None,
    options: SolverOptions | None = None,
    include_zero_mode: bool = False,
) -> Spectrum:
    """Accepted, interior-orthonormal eigenpairs in (lam_lo, lam_hi].

    Audit windows that disagree with the two-term Weyl count are rescanned
    at a quarter of the step. A remaining deficit is logged, or raised
    when ``options.strict_audit`` is set. Pairs whose operator residual
    exceeds ``operator_tolerance`` or whose PDE residual is not below
    ``pde_tolerance`` are dropped and counted in ``Spectrum.rejected``.

    Raises:
        ValueError: On an empty or non-positive range.
        MissingEigenvalueError: Strict audit with a persistent deficit.
        ResourceLimitError: Grid exceeds the node budget.
    """
    _check_range(lam_lo, lam_hi)
    policy = policy or GridPolicy()
    options = options or SolverOptions()
    grid = grid_for(domain, lam_hi, policy)
    step = options.step or default_step(domain, lam_hi)
    log.info("spectrum_start", bc=bc.label, lam_lo=lam_lo, lam_hi=lam_hi, nodes=grid.n, step=step)

    candidates, first = _search(bc, grid, lam_lo, lam_hi, step, options)
    scans = [first]
    accepted, rejected = _accept(candidates, options)

    audit = None
    if options.audit:
        audit = audit_weyl(domain, bc, [p.lam for p in accepted], lam_lo, lam_hi)
        for window in audit.flagged:
            more, sc = _search(bc, grid, window.lo, window.hi, step / 4.0, options)
            scans.append(sc)
            kept, dropped = _accept(more, options)
            accepted = [p for p in accepted if not window.lo < p.lam <= window.hi] + kept
            rejected += dropped
        if audit.flagged:
            audit = audit_weyl(domain, bc, [p.lam for p in accepted], lam_lo, lam_hi)
        for window in audit.flagged:
            tol = max(3.0, 0.05 * window.predicted)
            if window.deficit > tol:
                log.warning(
                    "missing_eigenvalues",
                    lo=window.lo,
                    hi=window.hi,
                    found=window.found,
                    predicted=round(window.predicted, 2),
                )
                if options.strict_audit:
                    raise MissingEigenvalueError(
                        f"window ({window.lo:.4g}, {window.hi:.4g}] found {window.found}, "
                        f"expected about {window.predicted:.1f}"
                    )

    pairs, dropped = _finish(group_clusters(accepted, options.degenerate_gap), options)
    rejected += dropped
    if include_zero_mode and bc.kind is BoundaryKind.NEUMANN:
        pairs = [p.with_(index=p.index + 1) for p in pairs]
        pairs.insert(0, neumann_zero_mode(grid).with_(index=1))
    log.info("spectrum_done", bc=bc.label, found=len(pairs), rejected=rejected)
    return Spectrum(
        bc=bc,
        grid=grid,
        pairs=pairs,
        lam_lo=lam_lo,
        lam_hi=lam_hi,
        audit=audit,
        scans=scans,
        rejected=rejected,
    )
