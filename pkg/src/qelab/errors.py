"""Exception hierarchy for qelab."""


class QELabError(Exception):
    """Base class for all qelab failures."""


class DomainConstructionError(QELabError, ValueError):
    """Arc list does not form a closed simple curve."""


class ArclengthRangeError(QELabError, ValueError):
    """Arclength outside [0, L)."""


class TangentialError(QELabError, ValueError):
    """Phase point on the glancing set |eta| = 1."""


class NoHitError(QELabError, RuntimeError):
    """A ray from inside the domain failed to meet the boundary."""


class DiagonalError(QELabError, ValueError):
    """Kernel evaluated at coincident points where it has no limit."""


class SingularityError(QELabError, ValueError):
    """Special function evaluated at its singular point."""


class ResourceLimitError(QELabError, RuntimeError):
    """Requested discretisation exceeds the configured node budget."""


class UnsupportedConfigurationError(QELabError, ValueError):
    """Operation not available for this grid or boundary condition."""


class AssemblyError(QELabError, RuntimeError):
    """Operator assembly hit an invalid evaluation."""


class QuadratureError(QELabError, RuntimeError):
    """A quadrature rule failed to converge or produced non-finite output."""


class AuditError(QELabError, RuntimeError):
    """A statistic was requested from a spectrum that failed its audit."""


class MissingEigenvalueError(AuditError):
    """Weyl audit still shows a deficit after rescanning."""


class IncompleteSpectrumError(QELabError, ValueError):
    """Heat-trace truncation guard violated."""


class ConfigError(QELabError, ValueError):
    """Malformed domain or run file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class AcceptanceError(QELabError, RuntimeError):
    """An enabled acceptance check failed."""

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        super().__init__(f"check '{check}' failed{': ' + detail if detail else ''}")
