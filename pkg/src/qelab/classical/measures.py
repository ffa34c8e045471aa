"""Limit measures and states attached to each boundary condition.

Densities on the coball bundle, relative to ds deta:

    Dirichlet       gamma
    Neumann, Robin  1 / gamma
    Psi1-Robin      gamma / (gamma^2 + k^2)

The state is omega(a) = 4 / (2 pi A) * integral of a against the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from qelab.billiard import gamma
from qelab.classical.symbols import Symbol
from qelab.conditions import BoundaryCondition, BoundaryKind
from qelab.errors import QuadratureError
from qelab.geometry import Domain

FloatArray = npt.NDArray[np.float64]

SPHERE_VOLUME = 2.0 * math.pi
STATE_FACTOR = 4.0


@dataclass(frozen=True)
class MeasureKind:
    """Limit measure selector; ``k`` is the Psi1-Robin multiplier symbol."""

    kind: BoundaryKind
    k: Symbol | None = None

    def __post_init__(self) -> None:
        if self.kind is BoundaryKind.PSI_ROBIN and self.k is None:
            raise ValueError("psirobin measure needs a multiplier symbol k")

    @classmethod
    def for_condition(cls, bc: BoundaryCondition) -> MeasureKind:
        from qelab.kernels.multiplier import psi_robin_symbol

        if bc.kind is BoundaryKind.PSI_ROBIN:
            return cls(kind=bc.kind, k=psi_robin_symbol(bc.alpha))
        return cls(kind=bc.kind)

    @property
    def uses_inverse_gamma(self) -> bool:
        return self.kind in (BoundaryKind.NEUMANN, BoundaryKind.ROBIN)


NEUMANN = MeasureKind(BoundaryKind.NEUMANN)
DIRICHLET = MeasureKind(BoundaryKind.DIRICHLET)


def mu_density(kind: MeasureKind, s: npt.ArrayLike, eta: npt.ArrayLike) -> FloatArray:
    """Density of the limit measure at (s, eta), |eta| < 1."""
    g = gamma(eta)
    if kind.kind is BoundaryKind.DIRICHLET:
        return g
    if kind.uses_inverse_gamma:
        with np.errstate(divide="ignore"):
            return 1.0 / g
    assert kind.k is not None
    k = np.real(kind.k(s, eta))
    return g / (g * g + k * k)


def invariant_function(kind: MeasureKind, s: npt.ArrayLike, eta: npt.ArrayLike) -> FloatArray:
    """Reciprocal of the density: the positive invariant function of the transfer operator."""
    g = gamma(eta)
    if kind.kind is BoundaryKind.DIRICHLET:
        with np.errstate(divide="ignore"):
            return 1.0 / g
    if kind.uses_inverse_gamma:
        return g
    assert kind.k is not None
    k = np.real(kind.k(s, eta))
    with np.errstate(divide="ignore"):
        return (g * g + k * k) / g


@lru_cache(maxsize=8)
def _chebyshev(n: int, second_kind: bool) -> tuple[FloatArray, FloatArray]:
    if second_kind:
        j = np.arange(1, n + 1)
        theta = j * math.pi / (n + 1)
        return np.cos(theta), math.pi / (n + 1) * np.sin(theta) ** 2
    j = np.arange(1, n + 1)
    return np.cos((2 * j - 1) * math.pi / (2 * n)), np.full(n, math.pi / n)


def integrate(
    kind: MeasureKind,
    a: Symbol,
    domain: Domain,
    n_s: int = 256,
    n_eta: int = 256,
) -> complex:
    """Integral of ``a`` against the limit measure over [0, L) x (-1, 1).

    Trapezoid in s; Gauss-Chebyshev in eta matched to the gamma weight so
    the endpoint behaviour is absorbed by the rule.

    Raises:
        QuadratureError: If the result is not finite.
    """
    s = np.arange(n_s) * (domain.length / n_s)
    w_s = domain.length / n_s
    second = kind.kind is BoundaryKind.DIRICHLET
    eta, w_eta = _chebyshev(n_eta, second)
    S, H = np.meshgrid(s, eta, indexing="ij")
    values = a(S, H)
    if kind.kind is BoundaryKind.PSI_ROBIN:
        assert kind.k is not None
        g2 = 1.0 - H * H
        k = np.real(kind.k(S, H))
        values = values * g2 / (g2 + k * k)
    total = complex(w_s * np.sum(values * w_eta[None, :]))
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise QuadratureError(f"non-finite integral of {a.name} against {kind.kind.value}")
    return total


def omega(kind: MeasureKind, a: Symbol, domain: Domain, n_eta: int = 256) -> complex:
    """Limit state omega_B(a) = 4 / (2 pi A) * integral of a d mu_B."""
    prefactor = STATE_FACTOR / (SPHERE_VOLUME * domain.area)
    return prefactor * integrate(kind, a, domain, n_eta=n_eta)


def c_const(domain: Domain) -> float:
    """2 pi A / (4 vol(B*Y)) with vol(B*Y) = 2L, i.e. pi A / (4L)."""
    return SPHERE_VOLUME * domain.area / (STATE_FACTOR * 2.0 * domain.length)


def psi_robin_dirichlet_weight(alpha: float, eta: npt.ArrayLike) -> FloatArray:
    """alpha^2 eta^2 gamma / (gamma^2 + alpha^2 eta^2); tends to gamma as alpha grows."""
    eta = np.asarray(eta, dtype=float)
    g = gamma(eta)
    k2 = (alpha * eta) ** 2
    return k2 * g / (g * g + k2)
