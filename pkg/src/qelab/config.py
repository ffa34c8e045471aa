"""Configuration: process settings and YAML domain/run files."""

from __future__ import annotations

import math
import re
from importlib import resources
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from qelab.conditions import BoundaryCondition, parse_bc
from qelab.errors import ConfigError, DomainConstructionError
from qelab.geometry import ArcSpec, Domain, build_domain
from qelab.qe.models import HeatMode


class Settings(BaseSettings):
    """qelab process settings, read from ``QELAB_*`` variables and ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="QELAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    out_dir: Path = Field(
        default=Path("qelab-out"),
        description="Directory receiving one subdirectory per run",
    )
    seed: int = Field(default=0, description="Seed for every random draw")
    threads: int = Field(default=1, ge=1, description="Worker threads for lam scans")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Logging level",
    )
    max_nodes: int = Field(default=4096, ge=16, description="Boundary node ceiling")
    points_per_wavelength: float = Field(default=10.0, ge=6.0)
    show_progress: bool = Field(default=False, description="tqdm bars on long scans")

    @field_validator("out_dir", mode="before")
    @classmethod
    def resolve_out_dir(cls, v: str | Path) -> Path:
        """Expand ``~`` and make the output directory absolute."""
        return Path(v).expanduser().resolve()


def load_settings(**overrides: Any) -> Settings:
    """Settings from the environment, with non-None ``overrides`` applied on top.

    Raises:
        ConfigError: If a value fails validation.
    """
    given = {k: v for k, v in overrides.items() if v is not None}
    try:
        return Settings(**given)
    except ValidationError as e:
        raise ConfigError(f"invalid settings: {e.errors()[0]['msg']}") from e


_PI_TERM = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?:(?P<coef>\d+(?:\.\d*)?|\.\d+)\s*\*?\s*)?pi"
    r"\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(value: float | int | str) -> float:
    """Angle in radians; strings may be multiples of pi such as ``"-pi/2"`` or ``"3*pi/2"``.

    Raises:
        ValueError: On anything else.
    """
    if isinstance(value, int | float):
        return float(value)
    text = value.strip().lower()
    m = _PI_TERM.match(text)
    if m is None:
        return float(text)
    out = math.pi * float(m["coef"] or 1.0) / float(m["den"] or 1.0)
    return -out if m["sign"] == "-" else out


class ArcEntry(BaseModel):
    """An arc as written in a domain file; angles may use ``pi``."""

    model_config = ConfigDict(extra="forbid")

    kind: str
    center: tuple[float, float] | None = None
    radius: float | None = None
    angles: tuple[float, float] | None = None
    endpoints: tuple[tuple[float, float], tuple[float, float]] | None = None

    @field_validator("angles", mode="before")
    @classmethod
    def _angles(cls, v: Any) -> Any:
        if v is None:
            return v
        if not isinstance(v, list | tuple) or len(v) != 2:
            raise ValueError("angles must be a pair [start, end]")
        return tuple(parse_angle(a) for a in v)

    def to_spec(self) -> ArcSpec:
        return ArcSpec.model_validate(self.model_dump())


class DomainSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    arcs: list[ArcEntry] = Field(..., min_length=1)


class RunOptions(BaseModel):
    """Per-run parameters from the ``run:`` block; CLI flags override them."""

    model_config = ConfigDict(extra="forbid")

    bc: str = "neumann"
    lmin: float = Field(default=0.5, gt=0)
    lmax: float = Field(default=20.0, gt=0)
    ppw: float = Field(default=10.0, ge=6.0)
    nodes: int | None = Field(default=None, ge=16)
    observable: str = "const"
    windows: str | None = None
    times: list[float] = Field(default_factory=lambda: [0.03])
    heat_mode: HeatMode | None = None
    phi: str | None = None
    egorov_lams: list[float] = Field(default_factory=lambda: [20.0, 40.0, 80.0])
    start: tuple[float, float] | None = None
    steps: int = Field(default=100, ge=1)
    strict_audit: bool = False

    @field_validator("bc")
    @classmethod
    def _bc(cls, v: str) -> str:
        parse_bc(v)
        return v

    @property
    def boundary_condition(self) -> BoundaryCondition:
        return parse_bc(self.bc)


class ConfigFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    domain: DomainSection
    run: RunOptions = Field(default_factory=RunOptions)


def _node_line(root: yaml.Node | None, loc: tuple[int | str, ...]) -> int | None:
    """1-based line of the YAML node at ``loc``, or of its deepest existing parent."""
    if root is None:
        return None
    node = root
    for key in loc:
        child = None
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    child = v
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int):
            if 0 <= key < len(node.value):
                child = node.value[key]
        if child is None:
            break
        node = child
    return node.start_mark.line + 1


def bundled_domain(stem: str) -> Path:
    return Path(str(resources.files("qelab") / "domains" / f"{stem}.yaml"))


def resolve_domain_path(name: str | Path) -> Path:
    """A file path, or the stem of a bundled domain (``disk``, ``stadium``, ``square``).

    Raises:
        ConfigError: If neither exists.
    """
    path = Path(name).expanduser()
    if path.is_file():
        return path
    bundled = bundled_domain(path.stem)
    if bundled.is_file():
        return bundled
    raise ConfigError(f"no domain file '{name}' and no bundled domain '{path.stem}'")


def parse_config_text(text: str) -> tuple[Domain, RunOptions]:
    """Parse domain/run YAML text; see :func:`parse_config`."""
    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {e}", mark.line + 1 if mark else None) from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping with a 'domain' key", 1)
    try:
        cfg = ConfigFile.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(p) for p in err["loc"])
        raise ConfigError(f"{where}: {err['msg']}", _node_line(root, tuple(err["loc"]))) from e
    specs = []
    for i, arc in enumerate(cfg.domain.arcs):
        try:
            specs.append(arc.to_spec())
        except ValidationError as e:
            line = _node_line(root, ("domain", "arcs", i))
            raise ConfigError(f"domain.arcs.{i}: {e.errors()[0]['msg']}", line) from e
    try:
        domain = build_domain(specs)
    except DomainConstructionError as e:
        raise ConfigError(str(e), _node_line(root, ("domain", "arcs"))) from e
    return domain, cfg.run


def parse_config(path: str | Path) -> tuple[Domain, RunOptions]:
    """Validated domain and run options from a YAML file.

    Raises:
        ConfigError: Unreadable or malformed file, unknown keys, invalid
            arcs or an arc list that does not close; carries the line
            number when one can be located.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e
    return parse_config_text(text)
