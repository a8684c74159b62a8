"""This module defines the application service for orbit traces and figures."""

from typing import Any, Optional

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.dtos import CommandResult, OrbitRunConfig, PlotRunConfig
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.families import skew_map_for
from newhouse_lab.application.report_publisher import ReportPublisher
from newhouse_lab.domain.bc_family import (
    RhoMode,
    Side,
    SkewPoint,
    line_of_tangencies,
    make_bc,
    orbit,
    stable_projection,
    unstable_projection,
)
from newhouse_lab.domain.errors import NewhouseLabError
from newhouse_lab.domain.events import ReportWritten
from newhouse_lab.domain.gap_lemma import IntersectionWitness, intersect_refine
from newhouse_lab.domain.hyperbolicity import cocycle_trace
from newhouse_lab.domain.ids import RunId
from newhouse_lab.domain.interval_cantor import hull
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface
from newhouse_lab.ports.service_interfaces import OrbitServiceInterface, PlotterInterface

TRACE_COLUMNS = ("n", "x", "y", "side", "A", "B", "D")
PLOT_WITNESS_TOL = 1e-10
PLOT_MAX_DEPTH = 80


class OrbitService(OrbitServiceInterface):
    """Application service for `orbit` and `plot` runs.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
        plotter (PlotterInterface): Renders the SVG figures.
    """

    def __init__(
        self,
        report_repo: ReportRepositoryInterface,
        event_dispatcher: EventDispatcher,
        plotter: PlotterInterface,
    ) -> None:
        self.publisher = ReportPublisher(report_repo, event_dispatcher)
        self.event_dispatcher = event_dispatcher
        self.plotter = plotter

    @emits(ReportWritten)
    def orbit(self, config: OrbitRunConfig, run_id: RunId) -> CommandResult:
        """Write `orbit.csv` with one row per iterate 1..n and its DF^n entries.

        Raises:
            HitCriticalLine: If an iterate lands on x = 0.
            UndefinedAtCriticalLine: If the start is on x = 0 without a side.
        """
        F = skew_map_for(config.family)
        start = SkewPoint(config.x, config.y, Side(config.side))
        trace = cocycle_trace(F, start, config.n)
        rows = [
            [
                row.n,
                row.point.x,
                row.point.y,
                str(row.point.side),
                row.state.A,
                row.state.B,
                row.state.D,
            ]
            for row in trace[1:]
        ]
        result = CommandResult(
            summary={"steps": len(rows), "derived": F.params.to_dict() if F.params else {}}
        )
        result.reports["orbit"] = self.publisher.csv(run_id, "orbit.csv", TRACE_COLUMNS, rows)
        return result

    @emits(ReportWritten)
    def plot(self, config: PlotRunConfig, run_id: RunId) -> CommandResult:
        """Write `plot.svg` and the data it shows to `plot.json`.

        The figure holds the projected stable and unstable covers, the line of
        tangencies, the intersection witness and optionally the orbit of the
        witness critical point.

        Raises:
            PreconditionError: If (t, m, c_rho) are out of range.
            LinkingViolated: If the strict linking inequality fails.
        """
        F = make_bc(config.t, config.m, config.c_rho, RhoMode(config.rho_mode))
        params = F.require_explicit()
        stable = stable_projection(F, config.generation)
        unstable = unstable_projection(F, config.generation)
        line = line_of_tangencies(F)

        witness: Optional[IntersectionWitness] = None
        notes: list[str] = []
        if config.witness:
            try:
                witness = intersect_refine(stable, unstable, PLOT_WITNESS_TOL, PLOT_MAX_DEPTH)
            except NewhouseLabError as e:
                notes.append(f"{type(e).__name__}: {e}")
        points: list[SkewPoint] = []
        if witness is not None and config.orbit_steps > 0:
            witness_y = (witness.point + 1.0) / params.rho
            try:
                points = orbit(F, SkewPoint(0.0, witness_y, Side.PLUS), config.orbit_steps)
            except NewhouseLabError as e:
                notes.append(f"{type(e).__name__}: {e}")

        data: dict[str, Any] = {
            "params": params.to_dict(),
            "line_of_tangencies": line.to_dict(),
            "stable_hull": hull(stable).to_list(),
            "unstable_hull": hull(unstable).to_list(),
            "witness": witness.to_dict() if witness else None,
            "orbit": [[p.x, p.y] for p in points],
            "notes": notes,
        }
        figure = self.plotter.render_tangency(stable, unstable, line, witness, points)
        result = CommandResult(summary={"derived": params.to_dict()})
        result.reports["plot"] = self.publisher.svg(run_id, "plot.svg", figure)
        result.reports["plot_data"] = self.publisher.json(run_id, "plot.json", data)
        return result
