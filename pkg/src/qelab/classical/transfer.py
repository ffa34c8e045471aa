"""Weighted transfer operators, ergodic averages and their projections."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
import structlog

from qelab.billiard import (
    STEP_INTERIOR,
    PhasePoint,
    billiard_step,
    gamma,
    orbit_ensemble,
    sample_phase_points,
)
from qelab.classical.measures import (
    NEUMANN,
    MeasureKind,
    c_const,
    invariant_function,
    mu_density,
    omega,
)
from qelab.classical.symbols import Symbol
from qelab.conditions import BoundaryKind
from qelab.geometry import Domain

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]


class TransferKind(str, Enum):
    """T pulls back along beta; T* along beta^-1; the Psi1-Robin weight uses k."""

    T = "T"
    TSTAR = "Tstar"
    PSI_ROBIN_WEIGHT = "psirobin"


def transfer_kind_for(kind: MeasureKind) -> TransferKind:
    if kind.kind is BoundaryKind.DIRICHLET:
        return TransferKind.TSTAR
    if kind.kind is BoundaryKind.PSI_ROBIN:
        return TransferKind.PSI_ROBIN_WEIGHT
    return TransferKind.T


def _step(
    domain: Domain, s: FloatArray, eta: FloatArray, backward: bool
) -> tuple[FloatArray, FloatArray, npt.NDArray[np.bool_]]:
    if backward:
        s2, eta2, status = billiard_step(domain, s, -eta)
        return s2, -eta2, status == STEP_INTERIOR
    s2, eta2, status = billiard_step(domain, s, eta)
    return s2, eta2, status == STEP_INTERIOR


def _k_values(k: Symbol | None, s: FloatArray, eta: FloatArray) -> FloatArray:
    if k is None:
        raise ValueError("psirobin weight needs the multiplier symbol k")
    return np.real(k(s, eta))


def transfer_values(
    kind: TransferKind,
    f: Symbol,
    domain: Domain,
    s: npt.ArrayLike,
    eta: npt.ArrayLike,
    k: Symbol | None = None,
) -> tuple[ComplexArray, npt.NDArray[np.bool_]]:
    """Apply a transfer operator to ``f`` at a batch of phase points.

    Returns:
        ``(values, valid)``; points whose step ends at a corner or goes
        tangential get value 0 and ``valid = False``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    backward = kind is TransferKind.TSTAR
    s2, eta2, ok = _step(domain, s, eta, backward)
    out = np.zeros(len(s), dtype=complex)
    if not ok.any():
        return out, ok
    g = gamma(eta[ok])
    g2 = gamma(eta2[ok])
    fv = f(s2[ok], eta2[ok])
    if kind is TransferKind.T:
        weight = g / g2
    elif kind is TransferKind.TSTAR:
        weight = g2 / g
    else:
        kq = _k_values(k, s[ok], eta[ok])
        kb = _k_values(k, s2[ok], eta2[ok])
        weight = (g * g + kq * kq) / g * g2 / (g2 * g2 + kb * kb)
    out[ok] = weight * fv
    return out, ok


@dataclass(frozen=True)
class TransferValue:
    value: complex
    valid: bool


def transfer_apply(
    kind: TransferKind,
    f: Symbol,
    domain: Domain,
    q: PhasePoint,
    k: Symbol | None = None,
) -> TransferValue:
    """Scalar form of :func:`transfer_values`."""
    values, ok = transfer_values(kind, f, domain, [q.s], [q.eta], k)
    return TransferValue(value=complex(values[0]), valid=bool(ok[0]))


@dataclass(frozen=True, eq=False)
class ErgodicAverages:
    """Finite ergodic averages per start, with the steps each orbit survived."""

    values: ComplexArray
    steps: npt.NDArray[np.int64]
    requested: int

    @property
    def survival_fraction(self) -> float:
        return float(np.mean(self.steps >= self.requested - 1))


def ergodic_averages(
    kind: MeasureKind,
    a: Symbol,
    domain: Domain,
    s0: npt.ArrayLike,
    eta0: npt.ArrayLike,
    n_terms: int,
) -> ErgodicAverages:
    """(1/N) sum_{k<N} of the k-th transfer power of ``a`` at each start.

    Neumann and Robin use T, Dirichlet uses T* (backward orbits), and
    Psi1-Robin uses the k-weighted operator. The powers telescope, so the
    k-th term is ``phi(q) / phi(beta^k q) * a(beta^k q)`` with ``phi`` the
    invariant function. Orbits ending early average the terms they have.
    """
    s0 = np.atleast_1d(np.asarray(s0, dtype=float))
    eta0 = np.atleast_1d(np.asarray(eta0, dtype=float))
    backward = kind.kind is BoundaryKind.DIRICHLET
    start_eta = -eta0 if backward else eta0
    ens = orbit_ensemble(domain, s0, start_eta, n_terms - 1)
    s = ens.s
    eta = -ens.eta if backward else ens.eta
    alive = np.isfinite(eta)
    S = np.where(alive, s, 0.0)
    H = np.where(alive, eta, 0.0)
    phi0 = invariant_function(kind, s0, eta0)
    phik = invariant_function(kind, S, H)
    terms = np.where(alive, phi0[None, :] / phik * a(S, H), 0.0)
    counts = alive.sum(axis=0)
    values = terms.sum(axis=0) / np.maximum(counts, 1)
    steps = counts - 1
    if np.any(steps < n_terms - 1):
        log.info(
            "ergodic_average_truncated",
            truncated=int(np.sum(steps < n_terms - 1)),
            total=len(s0),
        )
    return ErgodicAverages(values=values, steps=steps, requested=n_terms)


def ergodic_average(
    kind: MeasureKind, a: Symbol, domain: Domain, q: PhasePoint, n_terms: int
) -> complex:
    """Single-start :func:`ergodic_averages`."""
    return complex(ergodic_averages(kind, a, domain, [q.s], [q.eta], n_terms).values[0])


def projection_P(kind: MeasureKind, a: Symbol, domain: Domain) -> Symbol:
    """Closed-form limit of the ergodic averages: c * omega_B(a) * phi_B."""
    scale = c_const(domain) * omega(kind, a, domain)

    def limit(s: FloatArray, eta: FloatArray) -> ComplexArray:
        return scale * invariant_function(kind, s, eta)

    return Symbol(func=limit, name=f"P[{a.name}]", max_mode=0, real=abs(scale.imag) < 1e-14)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float


def _mc(values: FloatArray, volume: float) -> MCEstimate:
    n = len(values)
    return MCEstimate(
        mean=volume * float(np.mean(values)),
        stderr=volume * float(np.std(values, ddof=1) / np.sqrt(n)),
    )


def weighted_norm_mc(
    kind: TransferKind,
    f: Symbol,
    domain: Domain,
    n: int,
    rng: np.random.Generator,
    k: Symbol | None = None,
) -> tuple[MCEstimate, MCEstimate]:
    """Monte-Carlo estimates of the integrals of |Tf|^2 / gamma^2 and |f|^2 / gamma^2.

    ``f`` should vanish near |eta| = 1 so both integrands stay bounded.
    """
    s, eta = sample_phase_points(domain, n, rng)
    tf, _ = transfer_values(kind, f, domain, s, eta, k)
    g2 = 1.0 - eta * eta
    volume = 2.0 * domain.length
    lhs = _mc(np.abs(tf) ** 2 / g2, volume)
    rhs = _mc(np.abs(f(s, eta)) ** 2 / g2, volume)
    return lhs, rhs


def mean_ergodic_distance(
    domain: Domain,
    a: Symbol,
    n_terms: int,
    n_samples: int,
    rng: np.random.Generator,
    kind: MeasureKind | None = None,
) -> MCEstimate:
    """L^2 distance between the N-term ergodic average of ``a`` and its projection.

    The norm is that of L^2(mu_B^2 ds deta) restricted to the sampled
    starts; for Neumann this is the gamma^-2 weighted norm.
    """
    kind = kind or NEUMANN
    s, eta = sample_phase_points(domain, n_samples, rng)
    avg = ergodic_averages(kind, a, domain, s, eta, n_terms)
    limit = projection_P(kind, a, domain)(s, eta)
    dens = mu_density(kind, s, eta)
    sq = np.abs(avg.values - limit) ** 2 * dens * dens
    est = _mc(sq, 2.0 * domain.length)
    return MCEstimate(mean=float(np.sqrt(est.mean)), stderr=est.stderr / (2 * np.sqrt(est.mean)))
