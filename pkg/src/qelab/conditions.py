"""Boundary conditions shared by the classical, spectral and QE layers."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class BoundaryKind(str, Enum):
    """Boundary condition families."""

    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"
    ROBIN = "robin"
    PSI_ROBIN = "psirobin"


class BoundaryCondition(BaseModel):
    """A boundary condition with its parameter.

    ``kappa`` is the Robin coefficient (inward normal derivative equals
    kappa times the trace); ``alpha`` scales the first-order tangential
    multiplier of the Psi1-Robin condition.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: BoundaryKind
    kappa: float = 0.0
    alpha: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_params(self) -> BoundaryCondition:
        if self.kind is not BoundaryKind.ROBIN and self.kappa != 0.0:
            raise ValueError("kappa only applies to robin")
        if self.kind is not BoundaryKind.PSI_ROBIN and self.alpha != 0.0:
            raise ValueError("alpha only applies to psirobin")
        return self

    @classmethod
    def neumann(cls) -> BoundaryCondition:
        return cls(kind=BoundaryKind.NEUMANN)

    @classmethod
    def dirichlet(cls) -> BoundaryCondition:
        return cls(kind=BoundaryKind.DIRICHLET)

    @classmethod
    def robin(cls, kappa: float) -> BoundaryCondition:
        return cls(kind=BoundaryKind.ROBIN, kappa=kappa)

    @classmethod
    def psi_robin(cls, alpha: float) -> BoundaryCondition:
        return cls(kind=BoundaryKind.PSI_ROBIN, alpha=alpha)

    @property
    def is_dirichlet(self) -> bool:
        return self.kind is BoundaryKind.DIRICHLET

    @property
    def label(self) -> str:
        if self.kind is BoundaryKind.ROBIN:
            return f"robin:{self.kappa:g}"
        if self.kind is BoundaryKind.PSI_ROBIN:
            return f"psirobin:{self.alpha:g}"
        return self.kind.value


def parse_bc(text: str) -> BoundaryCondition:
    """Parse ``neumann``, ``dirichlet``, ``robin:<kappa>`` or ``psirobin:<alpha>``.

    Raises:
        ValueError: On an unknown family or a malformed parameter.
    """
    name, _, param = text.strip().lower().partition(":")
    try:
        kind = BoundaryKind(name)
    except ValueError:
        choices = ", ".join(k.value for k in BoundaryKind)
        raise ValueError(f"unknown boundary condition '{name}' (expected {choices})") from None
    if kind is BoundaryKind.ROBIN:
        return BoundaryCondition.robin(float(param) if param else 1.0)
    if kind is BoundaryKind.PSI_ROBIN:
        return BoundaryCondition.psi_robin(float(param) if param else 1.0)
    if param:
        raise ValueError(f"{kind.value} takes no parameter")
    return BoundaryCondition(kind=kind)
