"""The billiard map on the coball bundle of the boundary.

A phase point (s, eta) lifts to the inward unit velocity
``eta * tangent + gamma * normal``; the map follows that chord to the
next boundary hit and reads off the new tangential momentum. Corner
hits and glancing arrivals end an orbit.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
import structlog
from scipy import stats

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
from qelab.errors import NoHitError, TangentialError
from qelab.geometry import CORNER, MISS, Domain, boundary_point, boundary_points, ray_hits

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]
Observable = Callable[[FloatArray, FloatArray], npt.ArrayLike]

TANGENTIAL_CUTOFF = 1.0 - 1e-12

# billiard_step status codes
STEP_INTERIOR = 0
STEP_CORNER = 1
STEP_TANGENTIAL = 2


def gamma(q: PhasePoint | npt.ArrayLike) -> FloatArray:
    """sqrt(1 - eta^2), the normal component of the lifted velocity."""
    eta = q.eta if isinstance(q, PhasePoint) else q
    eta = np.asarray(eta, dtype=float)
    return np.sqrt(np.clip(1.0 - eta * eta, 0.0, None))


def lift(domain: Domain, q: PhasePoint) -> FloatArray:
    """Inward unit velocity projecting to ``q``.

    Raises:
        TangentialError: If |eta| >= 1 - 1e-12.
    """
    if abs(q.eta) >= TANGENTIAL_CUTOFF:
        raise TangentialError(f"|eta| = {abs(q.eta)} is tangential")
    bp = boundary_point(domain, q.s)
    return q.eta * bp.tangent + float(gamma(q)) * bp.normal


def billiard_step(
    domain: Domain, s: npt.ArrayLike, eta: npt.ArrayLike
) -> tuple[FloatArray, FloatArray, npt.NDArray[np.int8]]:
    """One application of the map to a batch of phase points.

    Returns:
        ``(s', eta', status)``; entries with a non-interior status carry
        ``nan`` momentum (and the corner arclength for corner hits).

    Raises:
        NoHitError: If any ray fails to meet the boundary.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    status = np.full(len(s), STEP_INTERIOR, dtype=np.int8)
    s_new = np.full(len(s), np.nan)
    eta_new = np.full(len(s), np.nan)

    live = np.abs(eta) < TANGENTIAL_CUTOFF
    status[~live] = STEP_TANGENTIAL
    if not live.any():
        return s_new, eta_new, status

    bp = boundary_points(domain, s[live])
    g = gamma(eta[live])
    v = eta[live, None] * bp.tangent + g[:, None] * bp.normal
    s_hit, _, hit_status = ray_hits(domain, bp.position, v)
    if np.any(hit_status == MISS):
        raise NoHitError(f"{int(np.sum(hit_status == MISS))} billiard rays missed")

    arrive = boundary_points(domain, s_hit)
    eta_hit = np.einsum("ij,ij->i", v, arrive.tangent)
    local = np.where(hit_status == CORNER, STEP_CORNER, STEP_INTERIOR).astype(np.int8)
    local[(local == STEP_INTERIOR) & (np.abs(eta_hit) >= TANGENTIAL_CUTOFF)] = (
        STEP_TANGENTIAL
    )

    idx = np.flatnonzero(live)
    status[idx] = local
    s_new[idx] = s_hit
    eta_new[idx] = np.where(local == STEP_INTERIOR, eta_hit, np.nan)
    return s_new, eta_new, status


def _outcome(s: float, eta: float, status: int) -> StepOutcome:
    if status == STEP_CORNER:
        return HitCorner(s=s)
    if status == STEP_TANGENTIAL:
        return Tangential()
    return Interior(PhasePoint(s=s, eta=eta))


def billiard_map(domain: Domain, q: PhasePoint) -> StepOutcome:
    """Forward billiard map."""
    if abs(q.eta) >= TANGENTIAL_CUTOFF:
        return Tangential()
    s, eta, status = billiard_step(domain, q.s, q.eta)
    outcome = _outcome(float(s[0]), float(eta[0]), int(status[0]))
    if isinstance(outcome, HitCorner):
        outcome = HitCorner(s=_snap_corner(domain, outcome.s))
    return outcome


def billiard_inverse(domain: Domain, q: PhasePoint) -> StepOutcome:
    """Backward map: reverse the momentum, step forward, reverse again."""
    out = billiard_map(domain, PhasePoint(q.s, -q.eta))
    if isinstance(out, Interior):
        return Interior(PhasePoint(out.point.s, -out.point.eta))
    return out


def _snap_corner(domain: Domain, s: float) -> float:
    c = np.asarray(domain.corners)
    d = np.abs(c - s)
    d = np.minimum(d, domain.length - d)
    return float(c[np.argmin(d)])


def orbit(domain: Domain, q: PhasePoint, n_steps: int) -> Orbit:
    """Iterate the map up to ``n_steps`` times from ``q``."""
    points = [q]
    current = q
    for k in range(n_steps):
        out = billiard_map(domain, current)
        if not isinstance(out, Interior):
            log.debug("orbit_terminated", step=k, reason=out.status.value)
            corner = out.s if isinstance(out, HitCorner) else None
            return Orbit(points=points, reason=out.status, steps=k, corner_s=corner)
        current = out.point
        points.append(current)
    return Orbit(points=points, reason=StepStatus.COMPLETED, steps=n_steps)


def orbit_ensemble(
    domain: Domain,
    s0: npt.ArrayLike,
    eta0: npt.ArrayLike,
    n_steps: int,
) -> OrbitEnsemble:
    """Iterate many starts in lockstep; dead orbits fill with nan."""
    s0 = np.atleast_1d(np.asarray(s0, dtype=float))
    eta0 = np.atleast_1d(np.asarray(eta0, dtype=float))
    m = len(s0)
    s_hist = np.full((n_steps + 1, m), np.nan)
    eta_hist = np.full((n_steps + 1, m), np.nan)
    s_hist[0], eta_hist[0] = s0, eta0
    survived = np.full(m, n_steps, dtype=np.int64)
    alive = np.abs(eta0) < TANGENTIAL_CUTOFF
    survived[~alive] = 0
    s_cur, eta_cur = s0.copy(), eta0.copy()
    for k in range(n_steps):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        s_next, eta_next, status = billiard_step(domain, s_cur[idx], eta_cur[idx])
        ok = status == STEP_INTERIOR
        dead = idx[~ok]
        survived[dead] = k
        alive[dead] = False
        keep = idx[ok]
        s_cur[keep], eta_cur[keep] = s_next[ok], eta_next[ok]
        s_hist[k + 1, keep] = s_next[ok]
        eta_hist[k + 1, keep] = eta_next[ok]
    n_dead = int(np.sum(survived < n_steps))
    if n_dead:
        log.info("orbits_truncated", dead=n_dead, total=m, steps=n_steps)
    return OrbitEnsemble(s=s_hist, eta=eta_hist, survived=survived)


def generating_check(domain: Domain, q: PhasePoint) -> float:
    """Residual of the chord-length generating function relations.

    With ``d(y, y') = |y - y'|`` the map satisfies
    ``eta = -grad_y d . T(y)`` and ``eta' = grad_y' d . T(y')``.

    Raises:
        TangentialError: If ``q`` does not map to an interior point.
    """
    out = billiard_map(domain, q)
    if not isinstance(out, Interior):
        raise TangentialError(f"generating check needs an interior step, got {out.status.value}")
    y = boundary_point(domain, q.s)
    y2 = boundary_point(domain, out.point.s)
    chord = y2.position - y.position
    d = float(np.hypot(*chord))
    grad_y = -chord / d
    grad_y2 = chord / d
    r1 = abs(q.eta + float(grad_y @ y.tangent))
    r2 = abs(out.point.eta - float(grad_y2 @ y2.tangent))
    return max(r1, r2)


def birkhoff_average(
    domain: Domain, q: PhasePoint, f: Observable, n_steps: int
) -> BirkhoffResult:
    """(1/n) sum_{k=1..n} f(beta^k q), over the steps the orbit survives."""
    ens = orbit_ensemble(domain, [q.s], [q.eta], n_steps)
    steps = int(ens.survived[0])
    if steps == 0:
        return BirkhoffResult(value=0.0, steps=0, requested=n_steps)
    s = ens.s[1 : steps + 1, 0]
    eta = ens.eta[1 : steps + 1, 0]
    values = np.broadcast_to(np.asarray(f(s, eta)), s.shape)
    value = complex(np.mean(values))
    if steps < n_steps:
        log.warning("birkhoff_truncated", steps=steps, requested=n_steps)
    return BirkhoffResult(value=value, steps=steps, requested=n_steps)


def sample_phase_points(
    domain: Domain, n: int, rng: np.random.Generator
) -> tuple[FloatArray, FloatArray]:
    """Draw ``n`` points uniform in (s, eta) on [0, L) x (-1, 1)."""
    s = rng.uniform(0.0, domain.length, n)
    eta = rng.uniform(-1.0, 1.0, n)
    return s, eta


def ks_invariance(
    domain: Domain, n_starts: int, n_steps: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Kolmogorov-Smirnov distances of pooled iterates from uniform in s and eta."""
    s0, eta0 = sample_phase_points(domain, n_starts, rng)
    ens = orbit_ensemble(domain, s0, eta0, n_steps)
    s = ens.s[1:].ravel()
    eta = ens.eta[1:].ravel()
    ok = np.isfinite(eta)
    ks_s = stats.kstest(s[ok] / domain.length, "uniform").statistic
    ks_eta = stats.kstest((eta[ok] + 1.0) / 2.0, "uniform").statistic
    log.info("ks_invariance", ks_s=float(ks_s), ks_eta=float(ks_eta), samples=int(ok.sum()))
    return float(ks_s), float(ks_eta)
