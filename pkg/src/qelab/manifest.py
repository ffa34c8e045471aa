"""Run manifests: the inputs that determine a run's output bytes."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import structlog
from pydantic import BaseModel, Field

from qelab import __version__
from qelab.qe.models import CheckResult

log = structlog.get_logger()

HASH_PREFIX = 12


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """Everything a run depends on, plus the outcome of its checks.

    The hash covers every field except ``checks``, so two runs with the
    same manifest land in the same directory and write the same CSV.
    """

    subcommand: str
    domain: str
    domain_hash: str
    bc: str | None = None
    lam_range: tuple[float, float] | None = None
    grid: dict[str, Any] = Field(default_factory=dict)
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    version: str = __version__
    checks: list[CheckResult] = Field(default_factory=list)

    def digest(self) -> str:
        payload = self.model_dump(mode="json", exclude={"checks"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def run_name(self) -> str:
        return f"{self.subcommand}-{self.digest()[:HASH_PREFIX]}"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def run_dir(self, out_dir: Path) -> Path:
        path = out_dir / self.run_name
        path.mkdir(parents=True, exist_ok=True)
        return path

    def write(self, run_dir: Path) -> Path:
        path = run_dir / "manifest.json"
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        log.debug("manifest_written", path=str(path), passed=self.passed)
        return path
