"""The command-line entry point for newhouse-lab.

This module is the Composition Root: it parses the command line, resolves the
run configuration, wires repositories, services and event handlers, runs one
subcommand and writes the run manifest.

Exit codes: 0 on success, 2 for an Inconclusive certificate, 1 on any
library, validation or I/O error.
"""

import argparse
import json
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Optional

from pydantic import BaseModel, ValidationError

from newhouse_lab.application.certification_service import CertificationService
from newhouse_lab.application.critical_dynamics_service import CriticalDynamicsService
from newhouse_lab.application.domain_event_handlers import (
    create_event_logging_handler,
    create_inconclusive_certificate_handler,
    is_inconclusive,
)
from newhouse_lab.application.dtos import (
    CertifyRunConfig,
    CommandResult,
    GapLemmaRunConfig,
    HyperRunConfig,
    OrbitRunConfig,
    PlotRunConfig,
    ReturnsRunConfig,
    RunConfig,
    SweepRunConfig,
    ThicknessRunConfig,
)
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.hyperbolicity_service import HyperbolicityService
from newhouse_lab.application.logging_service import (
    ConsoleLogWriter,
    JsonLinesFileLogWriter,
    LoggingService,
    LogWriter,
)
from newhouse_lab.application.orbit_service import OrbitService
from newhouse_lab.application.thickness_service import ThicknessService
from newhouse_lab.domain.errors import NewhouseLabError
from newhouse_lab.domain.events import BaseEvent, CertificateIssued
from newhouse_lab.domain.ids import RunId, run_id_for
from newhouse_lab.infrastructure.filesystem_report_repository import (
    FilesystemReportRepository,
)
from newhouse_lab.infrastructure.json_config_repository import JsonConfigRepository
from newhouse_lab.infrastructure.svg_plotter import SvgPlotter
from newhouse_lab.ports.repository_interfaces import (
    ConfigRepositoryInterface,
    ReportRepositoryInterface,
)
from newhouse_lab.presentation.logging import log as plog
from newhouse_lab.settings import TOOL_NAME, TOOL_VERSION, LabSettings

FAMILY_FLAGS = ("t", "m", "c_rho", "rho_mode")
SYSTEM_FLAGS = ("preset", "t", "m", "a", "b", "label", "alpha", "beta")


@dataclass
class Services:
    """The application services a command can run."""

    thickness: ThicknessService
    certification: CertificationService
    hyperbolicity: HyperbolicityService
    critical_dynamics: CriticalDynamicsService
    orbit: OrbitService


Runner = Callable[[Services, Any, RunId], CommandResult]


@dataclass(frozen=True)
class Command:
    """A subcommand: its config model and the service call that runs it."""

    model: type[RunConfig]
    run: Runner


COMMANDS: dict[str, Command] = {
    "thickness": Command(ThicknessRunConfig, lambda s, c, r: s.thickness.thickness(c, r)),
    "gaplemma": Command(GapLemmaRunConfig, lambda s, c, r: s.thickness.gap_lemma(c, r)),
    "certify": Command(CertifyRunConfig, lambda s, c, r: s.certification.certify(c, r)),
    "hyper": Command(HyperRunConfig, lambda s, c, r: s.hyperbolicity.assess(c, r)),
    "returns": Command(ReturnsRunConfig, lambda s, c, r: s.critical_dynamics.returns(c, r)),
    "orbit": Command(OrbitRunConfig, lambda s, c, r: s.orbit.orbit(c, r)),
    "plot": Command(PlotRunConfig, lambda s, c, r: s.orbit.plot(c, r)),
    "sweep": Command(SweepRunConfig, lambda s, c, r: s.certification.sweep(c, r)),
}


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t", type=float, help="explicit family: vertical parameter t")
    p.add_argument("--m", type=int, help="explicit family: tent-set index m")
    p.add_argument("--c-rho", dest="c_rho", type=float, help="explicit family: rho margin")
    p.add_argument("--rho-mode", dest="rho_mode", choices=["scaled", "three_halves"])


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Newhouse thickness lab.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thickness", parents=[common], help="thickness of a Cantor set")
    p.add_argument(
        "--preset", choices=["middle_thirds", "vertical", "tent", "affine"], help="system preset"
    )
    p.add_argument("--system", help="MarkovSystem JSON file")
    p.add_argument("--t", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--label")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--generations", type=int, nargs="+")
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false", default=None)
    p.add_argument("--svg", action="store_true", default=None)

    p = sub.add_parser("gaplemma", parents=[common], help="gap lemma for two systems")
    p.add_argument("--generation", type=int)
    p.add_argument("--witness-tol", dest="witness_tol", type=float)
    p.add_argument("--max-depth", dest="max_depth", type=int)

    p = sub.add_parser("certify", parents=[common], help="non-hyperbolicity certificate")
    _add_family_flags(p)
    p.add_argument("--generation", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--witness-tol", dest="witness_tol", type=float)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--tangency-k-max", dest="tangency_k_max", type=int)
    p.add_argument("--tangency-tol", dest="tangency_tol", type=float)

    p = sub.add_parser("hyper", parents=[common], help="hyperbolicity diagnostics")
    _add_family_flags(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--grid-density", dest="grid_density", type=int)
    p.add_argument("--n-forward", dest="n_forward", type=int)
    p.add_argument("--n-backward", dest="n_backward", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--max-period", dest="max_period", type=int)
    p.add_argument("--census-density", dest="census_density", type=int)
    p.add_argument("--transient", type=int)
    p.add_argument("--flatten-eps", dest="flatten_eps", type=float)

    p = sub.add_parser("returns", parents=[common], help="quasi-critical returns")
    _add_family_flags(p)
    p.add_argument("--eps", type=float)
    p.add_argument("--generation", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--flatten", action="store_true", default=None)
    p.add_argument("--markov-level", dest="markov_level", type=int)
    p.add_argument("--census", action="store_true", default=None)
    p.add_argument("--max-period", dest="max_period", type=int)

    p = sub.add_parser("orbit", parents=[common], help="orbit trace with cocycle")
    _add_family_flags(p)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--side", choices=["+", "-", "none"])
    p.add_argument("--n", type=int)

    p = sub.add_parser("plot", parents=[common], help="tangency figure")
    p.add_argument("--t", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--c-rho", dest="c_rho", type=float)
    p.add_argument("--rho-mode", dest="rho_mode", choices=["scaled", "three_halves"])
    p.add_argument("--generation", type=int)
    p.add_argument("--no-witness", dest="witness", action="store_false", default=None)
    p.add_argument("--orbit-steps", dest="orbit_steps", type=int)

    p = sub.add_parser("sweep", parents=[common], help="thickness/linking sensitivity sweep")
    p.add_argument("--ts", type=float, nargs="+")
    p.add_argument("--ms", type=int, nargs="+")
    p.add_argument("--c-rhos", dest="c_rhos", type=float, nargs="+")
    p.add_argument("--generation", type=int)
    return parser


def resolve_config(
    command: str, args: argparse.Namespace, config_repo: ConfigRepositoryInterface
) -> RunConfig:
    """Merge the `--config` file with command-line overrides and validate.

    Raises:
        ValidationError: If the merged configuration is invalid.
        ConfigError: If the config file is not a JSON object.
        OSError: If a file cannot be read.
    """
    model = COMMANDS[command].model
    data: dict[str, Any] = config_repo.load(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if v is not None}
    fields = model.model_fields

    if "family" in fields:
        family_flags = {k: flags.pop(k) for k in FAMILY_FLAGS if k in flags}
        if family_flags:
            family = dict(data.get("family") or {"kind": "explicit_bc"})
            family.update(family_flags)
            data["family"] = family
    if command == "thickness":
        system = dict(data.get("system") or {})
        if "system" in flags:
            loaded = config_repo.load_system(flags.pop("system"))
            system = {"branches": loaded.to_dict()["branches"], "label": loaded.label}
        system.update({k: flags.pop(k) for k in SYSTEM_FLAGS if k in flags})
        if system:
            data["system"] = system
    data.update({k: v for k, v in flags.items() if k in fields})
    return model.model_validate(data)


def canonical_key(command: str, config: BaseModel) -> str:
    """Canonical JSON of the command and its resolved configuration, without `out`."""
    payload = {"command": command, "config": config.model_dump(mode="json", exclude={"out"})}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def compose(out_dir: str, settings: LabSettings) -> tuple[Services, ReportRepositoryInterface]:
    """Wire repositories, services and event handlers for one run."""
    repo = FilesystemReportRepository(out_dir)
    writers: list[LogWriter] = [ConsoleLogWriter()]
    if settings.log_to_file:
        writers.append(JsonLinesFileLogWriter(os.path.join(out_dir, "run.log.jsonl")))
    logging_service = LoggingService(writers=writers, level=settings.log_level)
    event_dispatcher = EventDispatcher()
    event_dispatcher.subscribe(BaseEvent, create_event_logging_handler(logging_service))
    event_dispatcher.subscribe(
        CertificateIssued,
        create_inconclusive_certificate_handler(logging_service),
        condition=is_inconclusive,
    )
    plotter = SvgPlotter()
    services = Services(
        thickness=ThicknessService(repo, event_dispatcher, plotter),
        certification=CertificationService(repo, event_dispatcher, threads=settings.threads),
        hyperbolicity=HyperbolicityService(repo, event_dispatcher),
        critical_dynamics=CriticalDynamicsService(repo, event_dispatcher),
        orbit=OrbitService(repo, event_dispatcher, plotter),
    )
    return services, repo


def run(
    argv: Optional[Sequence[str]] = None,
    *,
    config_repo: Optional[ConfigRepositoryInterface] = None,
    settings: Optional[LabSettings] = None,
) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    config_repo = config_repo or JsonConfigRepository()
    plog(f"--- {TOOL_NAME} {args.command} starting ---", category="lifecycle")
    try:
        settings = settings or LabSettings()
        config = resolve_config(args.command, args, config_repo)
        out_dir = config.out or settings.out_dir
        run_id = run_id_for(canonical_key(args.command, config))
        services, repo = compose(out_dir, settings)
        result = COMMANDS[args.command].run(services, config, run_id)
        manifest = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": args.command,
            "run_id": str(run_id),
            "config": config.model_dump(mode="json", exclude={"out"}),
            "derived": result.summary.get("derived", {}),
            "reports": {k: os.path.basename(v) for k, v in sorted(result.reports.items())},
            "exit_code": result.exit_code,
        }
        repo.write_json("manifest.json", manifest)
    except (NewhouseLabError, ValidationError, OSError) as e:
        context = e.context() if isinstance(e, NewhouseLabError) else {}
        plog(
            f"{args.command} failed",
            level="ERROR",
            category="lifecycle",
            data={"type": type(e).__name__, "message": str(e), **context},
        )
        return 1
    plog(
        f"--- {TOOL_NAME} {args.command} finished ---",
        category="lifecycle",
        data={"exit_code": result.exit_code, "out": out_dir, "run_id": str(run_id)},
    )
    return result.exit_code


def main() -> int:
    """Console-script entry point."""
    return run()


if __name__ == "__main__":
    raise SystemExit(main())
