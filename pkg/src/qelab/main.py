"""qelab CLI entry point."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import structlog

from qelab import __version__
from qelab.billiard import PhasePoint, birkhoff_average, ks_invariance, orbit
from qelab.classical import (
    MeasureKind,
    const,
    mean_ergodic_distance,
    omega,
    parse_observable,
)
from qelab.conditions import BoundaryCondition, BoundaryKind, parse_bc
from qelab.config import RunOptions, Settings, load_settings, parse_config, resolve_domain_path
from qelab.discretize import dump_matrix
from qelab.eigensolve import (
    GridPolicy,
    SolverOptions,
    Spectrum,
    characteristic_matrix,
    expand_multiplicity,
    oracle_disk_eigenvalues,
    solve_spectrum,
)
from qelab.errors import AcceptanceError, QELabError, UnsupportedConfigurationError
from qelab.geometry import ArcKind, Domain
from qelab.manifest import RunManifest, file_digest
from qelab.qe import (
    CheckResult,
    HeatMode,
    accumulation_check,
    default_windows,
    egorov_residual,
    heat_trace,
    matrix_elements,
    norm_limit,
    parse_windows,
    qe_variance,
    rellich_bound_check,
    rellich_check,
    residual_slope,
    variance_decay_check,
    weyl_check,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

CSV_FLOAT_FORMAT = "%.17g"


def configure_logging(level: str) -> None:
    """Configure structlog for the application."""
    logging.basicConfig(
        format="%(message)s",
        level=getattr(logging, level.upper(), logging.INFO),
        stream=sys.stderr,
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty()),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


@dataclass
class RunContext:
    """Resolved inputs shared by every subcommand."""

    settings: Settings
    domain: Domain
    domain_name: str
    domain_hash: str
    options: RunOptions
    args: argparse.Namespace

    @property
    def bc(self) -> BoundaryCondition:
        return self.options.boundary_condition

    @property
    def policy(self) -> GridPolicy:
        return GridPolicy(
            points_per_wavelength=self.options.ppw,
            nodes=self.options.nodes,
            max_nodes=self.settings.max_nodes,
        )

    @property
    def solver(self) -> SolverOptions:
        return SolverOptions(
            threads=self.settings.threads,
            show_progress=self.settings.show_progress,
            strict_audit=self.options.strict_audit,
        )

    def spectrum(self, bc: BoundaryCondition | None = None, zero_mode: bool = False) -> Spectrum:
        return solve_spectrum(
            self.domain,
            bc or self.bc,
            self.options.lmin,
            self.options.lmax,
            self.policy,
            self.solver,
            include_zero_mode=zero_mode,
        )


@dataclass
class RunResult:
    """What a subcommand hands back for writing."""

    table: pd.DataFrame
    table_name: str
    summary: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)
    uses_spectrum: bool = True
    writers: list[Callable[[Path], None]] = field(default_factory=list)


def write_table(df: pd.DataFrame, path: Path) -> Path:
    """CSV with '.' decimals, 17 significant digits and '\\n' line ends."""
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def _is_circle(domain: Domain) -> bool:
    return domain.n_arcs == 1 and domain.specs[0].kind is ArcKind.CIRCLE_ARC


def _circle_radius(domain: Domain) -> float:
    radius = domain.specs[0].radius
    assert radius is not None
    return radius


def _spectrum_rows(spectrum: Spectrum) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "index": [p.index for p in spectrum.pairs],
            "lam": [p.lam for p in spectrum.pairs],
            "multiplicity": [p.cluster for p in spectrum.pairs],
            "sigma_min": [p.sigma_min for p in spectrum.pairs],
            "pde_res": [p.residuals.pde_res for p in spectrum.pairs],
            "bc_res": [p.residuals.bc_res for p in spectrum.pairs],
            "operator_res": [p.residuals.operator_res for p in spectrum.pairs],
            "trace_norm_sq": [p.trace_norm_sq for p in spectrum.pairs],
            "near_degenerate": [p.near_degenerate for p in spectrum.pairs],
        }
    )


def _spectrum_checks(ctx: RunContext, spectrum: Spectrum) -> list[CheckResult]:
    checks = []
    positive = [p for p in spectrum.pairs if p.lam > 0]
    if positive:
        worst = max(p.residuals.operator_res for p in positive)
        checks.append(CheckResult.at_most("operator_residual", worst, 1e-6))
        worst_pde = max(p.residuals.pde_res for p in positive)
        checks.append(CheckResult.at_most("pde_residual", worst_pde, 1e-4))
    if spectrum.audit is not None:
        deficit = max((w.deficit for w in spectrum.audit.windows), default=0.0)
        bound = max((max(3.0, 0.05 * w.predicted) for w in spectrum.audit.windows), default=3.0)
        checks.append(CheckResult.at_most("weyl_audit_deficit", deficit, bound))
    if _is_circle(ctx.domain):
        modes = oracle_disk_eigenvalues(spectrum.bc, spectrum.lam_hi, _circle_radius(ctx.domain))
        expected = [x for x in expand_multiplicity(modes) if x > spectrum.lam_lo]
        found = sorted(p.lam for p in positive)
        checks.append(CheckResult.absolute("oracle_count", len(found), len(expected), 0.0))
        if len(found) == len(expected) and found:
            err = max(abs(f - e) / e for f, e in zip(found, expected, strict=True))
            checks.append(CheckResult.at_most("oracle_relative_error", err, 1e-6))
    return checks


def cmd_billiard(ctx: RunContext) -> RunResult:
    start = ctx.options.start if ctx.options.start is not None else (0.0, 0.5)
    q = PhasePoint(s=start[0], eta=start[1])
    orb = orbit(ctx.domain, q, ctx.options.steps)
    table = pd.DataFrame({"step": np.arange(len(orb.points)), "s": orb.s, "eta": orb.eta})
    checks = []
    if _is_circle(ctx.domain):
        drift = float(np.max(np.abs(orb.eta - orb.eta[0])))
        checks.append(CheckResult.at_most("eta_conservation", drift, 1e-12))
    summary: dict[str, Any] = {
        "reason": orb.reason.value,
        "steps": orb.steps,
        "corner_s": orb.corner_s,
    }
    params: dict[str, Any] = {"start": list(start), "steps": ctx.options.steps}
    if ctx.args.observable is not None:
        a = parse_observable(ctx.args.observable, ctx.domain.length)
        avg = birkhoff_average(ctx.domain, q, a, ctx.options.steps)
        summary["birkhoff"] = {
            "observable": a.name,
            "value": avg.value.real,
            "value_imag": avg.value.imag,
            "steps": avg.steps,
            "truncated": avg.truncated,
        }
        params["observable"] = a.name
    return RunResult(table, "orbit.csv", summary, checks, params, uses_spectrum=False)


def cmd_classical(ctx: RunContext) -> RunResult:
    args = ctx.args
    rng = np.random.default_rng(ctx.settings.seed)
    a = parse_observable(ctx.options.observable, ctx.domain.length)
    kind = MeasureKind.for_condition(ctx.bc)
    checks = []

    identity = {
        BoundaryKind.NEUMANN: 2.0 * ctx.domain.length / ctx.domain.area,
        BoundaryKind.DIRICHLET: ctx.domain.length / ctx.domain.area,
    }
    omega_a = omega(kind, a, ctx.domain)
    omega_1 = omega(kind, const(), ctx.domain).real
    if ctx.bc.kind in identity:
        checks.append(CheckResult.relative("omega_identity", omega_1, identity[ctx.bc.kind], 1e-10))

    ks_s, ks_eta = ks_invariance(ctx.domain, args.ks_samples, ctx.options.steps, rng)
    checks.append(CheckResult.at_most("ks_invariance", max(ks_s, ks_eta), args.ks_tolerance))

    rows = []
    for n in args.terms:
        est = mean_ergodic_distance(ctx.domain, a, n, args.samples, rng, kind)
        rows.append({"n_terms": n, "distance": est.mean, "stderr": est.stderr})
    table = pd.DataFrame(rows)
    if len(rows) > 1:
        decay = rows[0]["distance"] / rows[-1]["distance"]
        checks.append(CheckResult.at_least("mean_ergodic_decay", decay, 3.0))

    summary = {
        "omega": omega_a.real,
        "omega_identity": omega_1,
        "ks_s": ks_s,
        "ks_eta": ks_eta,
    }
    params = {
        "observable": ctx.options.observable,
        "samples": args.samples,
        "ks_samples": args.ks_samples,
        "steps": ctx.options.steps,
        "terms": list(args.terms),
    }
    return RunResult(table, "ergodic.csv", summary, checks, params, uses_spectrum=False)


def cmd_spectrum(ctx: RunContext) -> RunResult:
    spectrum = ctx.spectrum()
    table = _spectrum_rows(spectrum)
    checks = _spectrum_checks(ctx, spectrum)
    summary = {
        "found": len(spectrum),
        "rejected": spectrum.rejected,
        "nodes": spectrum.grid.n,
        "weyl_predicted": spectrum.audit.total_predicted if spectrum.audit else None,
    }

    def write_traces(run_dir: Path) -> None:
        grid = spectrum.grid
        np.savez(
            run_dir / "traces.npz",
            lams=spectrum.lams,
            traces=np.array([p.trace for p in spectrum.pairs]).reshape(len(spectrum), grid.n),
            s=grid.s,
            weights=grid.weights,
            positions=grid.samples.position,
        )

    writers = [write_traces]
    if ctx.args.dump:

        def write_matrices(run_dir: Path) -> None:
            for lam in sorted({p.lam for p in spectrum.pairs if p.lam > 0}):
                op = characteristic_matrix(spectrum.bc, lam, spectrum.grid)
                dump_matrix(op, run_dir / "matrices" / f"char-{lam:.10f}.c16")

        writers.append(write_matrices)
    return RunResult(table, "spectrum.csv", summary, checks, writers=writers)


def cmd_qe(ctx: RunContext) -> RunResult:
    args = ctx.args
    spectrum = ctx.spectrum()
    a = parse_observable(ctx.options.observable, ctx.domain.length)
    report = matrix_elements(spectrum.pairs, a, spectrum.audit)
    if ctx.options.windows:
        windows = parse_windows(ctx.options.windows)
    else:
        windows = default_windows(len(report.rows))
    table = pd.DataFrame([r.model_dump() for r in report.rows])
    table["normalized"] = report.normalized
    table["cesaro"] = report.cesaro()
    table["running_variance"] = report.running_variance()

    checks = [weyl_check(report, ctx.options.lmax, args.tolerance)]
    if args.check_decay and len(windows) >= 2:
        checks.append(variance_decay_check(report, windows[0], windows[-1]))
    if args.check_accumulation:
        checks.append(accumulation_check(report))
    summary = {
        "observable": report.observable,
        "target": report.target,
        "target_identity": report.target_identity,
        "states": len(report.rows),
        "variance": [v.model_dump() for v in qe_variance(report, windows)],
        "norm_limit": [m.model_dump() for m in norm_limit(report, windows)],
    }
    params = {
        "observable": ctx.options.observable,
        "windows": [w.label for w in windows],
        "tolerance": args.tolerance,
    }
    return RunResult(table, "qe.csv", summary, checks, params)


def cmd_egorov(ctx: RunContext) -> RunResult:
    a = parse_observable(ctx.options.observable, ctx.domain.length)
    lams = ctx.options.egorov_lams
    rows = egorov_residual(
        ctx.domain, ctx.bc, a, lams, ctx.policy, n_vectors=ctx.args.vectors, seed=ctx.settings.seed
    )
    table = pd.DataFrame([r.model_dump() for r in rows])
    checks = []
    summary: dict[str, Any] = {"observable": ctx.options.observable}
    if len(rows) >= 3:
        slope = residual_slope(rows)
        summary["slope"] = slope
        checks.append(CheckResult.absolute("egorov_slope", slope, -1.0, 0.3))
    params = {"observable": ctx.options.observable, "lams": list(lams), "vectors": ctx.args.vectors}
    return RunResult(table, "egorov.csv", summary, checks, params, uses_spectrum=False)


def cmd_rellich(ctx: RunContext) -> RunResult:
    if ctx.bc.kind is not BoundaryKind.DIRICHLET:
        raise UnsupportedConfigurationError("rellich runs on Dirichlet spectra (--bc dirichlet)")
    spectrum = ctx.spectrum()
    rows = rellich_check(spectrum.pairs)
    limit = ctx.args.states or len(rows)
    rows = rows[:limit]
    table = pd.DataFrame([r.model_dump() for r in rows])
    tol = ctx.args.tolerance
    if tol is None:
        tol = 1e-6 if _is_circle(ctx.domain) else 1e-2
    worst = max((r.rel_error for r in rows), default=math.nan)
    checks = [
        CheckResult.at_most("rellich_relative_error", worst, tol),
        rellich_bound_check(spectrum.pairs[:limit]),
    ]
    summary = {"states": len(rows), "max_rel_error": worst}
    return RunResult(table, "rellich.csv", summary, checks, {"states": limit, "tolerance": tol})


def cmd_heat(ctx: RunContext) -> RunResult:
    mode = ctx.options.heat_mode
    if mode is None:
        mode = HeatMode.DIRICHLET_TILDE if ctx.bc.is_dirichlet else HeatMode.BOUNDARY
    spectrum = ctx.spectrum(zero_mode=True)
    phi = parse_observable(ctx.options.phi, ctx.domain.length) if ctx.options.phi else None
    rows = heat_trace(spectrum.pairs, ctx.options.times, mode, phi, lam_max=ctx.options.lmax)
    table = pd.DataFrame([r.model_dump() for r in rows])
    checks = [
        CheckResult.relative(f"heat_trace[t={r.t:g}]", r.value, r.target, ctx.args.tolerance)
        for r in rows
    ]
    params = {
        "mode": mode.value,
        "times": list(ctx.options.times),
        "phi": ctx.options.phi,
        "tolerance": ctx.args.tolerance,
    }
    return RunResult(table, "heat.csv", {"mode": mode.value}, checks, params)


COMMANDS: dict[str, Callable[[RunContext], RunResult]] = {
    "billiard": cmd_billiard,
    "classical": cmd_classical,
    "spectrum": cmd_spectrum,
    "qe": cmd_qe,
    "egorov": cmd_egorov,
    "rellich": cmd_rellich,
    "heat": cmd_heat,
}


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _pair(text: str) -> tuple[float, float]:
    values = _floats(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got '{text}'")
    return values[0], values[1]


def _bc(text: str) -> str:
    try:
        parse_bc(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qelab",
        description="Numerical checks of boundary quantum ergodicity on planar domains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--out", type=Path, default=None, help="Output root (default: QELAB_OUT_DIR)"
    )
    parser.add_argument("--seed", type=int, default=None, help="Random seed")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for lam scans")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Logging level",
    )
    parser.add_argument("--progress", action="store_true", default=None, help="Show progress bars")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--domain",
        default="disk",
        help="Domain YAML file or bundled name: disk, stadium, square (default: disk)",
    )
    common.add_argument(
        "--bc", type=_bc, default=None, help="neumann | dirichlet | robin:k | psirobin:a"
    )
    common.add_argument("--lmin", type=float, default=None, help="Lower end of the lam range")
    common.add_argument("--lmax", type=float, default=None, help="Upper end of the lam range")
    common.add_argument("--ppw", type=float, default=None, help="Boundary points per wavelength")
    common.add_argument("--nodes", type=int, default=None, help="Explicit boundary node count")
    common.add_argument(
        "--observable", default=None, help="const | fourier:m | eta_window:c,w | a*b"
    )
    common.add_argument("--strict-audit", action="store_true", default=None)

    sub = parser.add_subparsers(dest="command", help="Commands")

    p = sub.add_parser("billiard", parents=[common], help="Iterate the billiard map")
    p.add_argument("--start", type=_pair, default=None, help="Start point s,eta")
    p.add_argument("--steps", type=int, default=None, help="Number of map steps")

    p = sub.add_parser("classical", parents=[common], help="Invariance and mean ergodic checks")
    p.add_argument("--steps", type=int, default=None, help="Steps per orbit for the KS test")
    p.add_argument(
        "--samples", type=int, default=2000, help="Phase-space samples for ergodic averages"
    )
    p.add_argument(
        "--ks-samples",
        type=int,
        default=10_000,
        help="Orbit starts for the KS test; with 100 steps this pools 10^6 iterates",
    )
    p.add_argument("--terms", type=_ints, default=[10, 1000], help="Ergodic average lengths")
    p.add_argument("--ks-tolerance", type=float, default=0.01)

    p = sub.add_parser("spectrum", parents=[common], help="Eigenvalues and boundary traces")
    p.add_argument("--dump", action="store_true", help="Write characteristic matrices")

    p = sub.add_parser("qe", parents=[common], help="Matrix elements, local Weyl law, variance")
    p.add_argument("--windows", default=None, help="State windows such as 1-25,26-100")
    p.add_argument("--tolerance", type=float, default=0.15)
    p.add_argument("--check-decay", action="store_true", help="Require variance decay by 2")
    p.add_argument(
        "--check-accumulation", action="store_true", help="Require two accumulation points"
    )

    p = sub.add_parser("egorov", parents=[common], help="Egorov residuals over lam")
    p.add_argument("--lams", type=_floats, default=None, help="Wavenumbers, e.g. 20,40,80")
    p.add_argument("--vectors", type=int, default=20, help="Random test vectors per lam")

    p = sub.add_parser("rellich", parents=[common], help="Rellich identity per Dirichlet state")
    p.add_argument("--states", type=int, default=None, help="Check only the first N states")
    p.add_argument("--tolerance", type=float, default=None)

    p = sub.add_parser("heat", parents=[common], help="Truncated boundary heat traces")
    p.add_argument("--times", type=_floats, default=None, help="t values, e.g. 0.03,0.05")
    p.add_argument("--mode", choices=[m.value for m in HeatMode], default=None)
    p.add_argument("--phi", default=None, help="Multiplication observable for the weighted trace")
    p.add_argument("--tolerance", type=float, default=0.2)
    return parser


_RUN_OVERRIDES = {
    "bc": "bc",
    "lmin": "lmin",
    "lmax": "lmax",
    "ppw": "ppw",
    "nodes": "nodes",
    "observable": "observable",
    "windows": "windows",
    "times": "times",
    "mode": "heat_mode",
    "phi": "phi",
    "lams": "egorov_lams",
    "start": "start",
    "steps": "steps",
    "strict_audit": "strict_audit",
}


def _merge_options(base: RunOptions, args: argparse.Namespace) -> RunOptions:
    """Run block from the domain file with CLI flags applied on top."""
    data = base.model_dump()
    for flag, key in _RUN_OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    return RunOptions.model_validate(data)


def _context(args: argparse.Namespace) -> RunContext:
    settings = load_settings(
        out_dir=args.out,
        seed=args.seed,
        threads=args.threads,
        log_level=args.log_level,
        show_progress=args.progress,
    )
    path = resolve_domain_path(args.domain)
    domain, file_options = parse_config(path)
    options = _merge_options(file_options, args)
    if args.ppw is None and "ppw" not in file_options.model_fields_set:
        options = options.model_copy(update={"ppw": settings.points_per_wavelength})
    return RunContext(
        settings=settings,
        domain=domain,
        domain_name=path.name,
        domain_hash=file_digest(path),
        options=options,
        args=args,
    )


def _manifest(ctx: RunContext, result: RunResult) -> RunManifest:
    spectral = result.uses_spectrum
    return RunManifest(
        subcommand=ctx.args.command,
        domain=ctx.domain_name,
        domain_hash=ctx.domain_hash,
        bc=ctx.bc.label if ctx.args.command != "billiard" else None,
        lam_range=(ctx.options.lmin, ctx.options.lmax) if spectral else None,
        grid=ctx.policy.model_dump() if spectral or ctx.args.command == "egorov" else {},
        parameters=result.parameters,
        seed=ctx.settings.seed,
        checks=result.checks,
    )


def execute(args: argparse.Namespace) -> int:
    """Run one subcommand and write its artifacts.

    Raises:
        AcceptanceError: If any check failed; the artifacts are written first.
    """
    log = structlog.get_logger()
    ctx = _context(args)
    log.info("run_start", command=args.command, domain=ctx.domain_name, bc=ctx.bc.label)
    result = COMMANDS[args.command](ctx)
    manifest = _manifest(ctx, result)
    run_dir = manifest.run_dir(ctx.settings.out_dir)
    manifest.write(run_dir)
    write_table(result.table, run_dir / result.table_name)
    for writer in result.writers:
        writer(run_dir)
    summary = {
        "subcommand": args.command,
        "run": manifest.run_name,
        **result.summary,
        "checks": [c.model_dump() for c in result.checks],
        "passed": manifest.passed,
    }
    (run_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=False, default=str) + "\n", encoding="utf-8"
    )
    log.info("run_done", run_dir=str(run_dir), passed=manifest.passed)
    print(run_dir)
    if not manifest.passed:
        raise AcceptanceError(", ".join(manifest.failed), f"see {run_dir / 'summary.json'}")
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and execute; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_ERROR
    try:
        configure_logging(args.log_level or load_settings().log_level)
        return execute(args)
    except AcceptanceError as e:
        structlog.get_logger().error("checks_failed", failed=e.check)
        print(f"failed checks: {e.check}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (QELabError, ValueError) as e:
        structlog.get_logger().error("run_failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    """Main entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
