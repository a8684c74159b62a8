"""This module defines the application service for critical dynamics.

CriticalDynamicsService classifies the returns of quasi-critical points and,
on request, flattens the critical strip and builds the box absorption graph.
"""

from typing import Any

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.dtos import CommandResult, ReturnsRunConfig
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.families import default_eps, skew_map_for
from newhouse_lab.application.report_publisher import ReportPublisher
from newhouse_lab.domain.critical_dynamics import (
    ReturnVerdict,
    box_absorption,
    flatten,
    flatten_distance,
    quasi_critical_returns,
)
from newhouse_lab.domain.events import (
    BaseEvent,
    BoxGraphBuilt,
    ReportWritten,
    ReturnsClassified,
    SinkCensusCompleted,
)
from newhouse_lab.domain.hyperbolicity import Region, SinkRecord, sink_census
from newhouse_lab.domain.ids import RunId
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface
from newhouse_lab.ports.service_interfaces import CriticalDynamicsServiceInterface

RETURN_COLUMNS = ("x", "y", "verdict", "m_y", "sink_id", "trace_length")


class CriticalDynamicsService(CriticalDynamicsServiceInterface):
    """Application service for `returns` runs.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
    """

    def __init__(
        self, report_repo: ReportRepositoryInterface, event_dispatcher: EventDispatcher
    ) -> None:
        self.publisher = ReportPublisher(report_repo, event_dispatcher)
        self.event_dispatcher = event_dispatcher

    @emits(ReturnsClassified, SinkCensusCompleted, BoxGraphBuilt, ReportWritten)
    def returns(self, config: ReturnsRunConfig, run_id: RunId) -> CommandResult:
        """Classify quasi-critical returns and write `returns.csv` and `returns.json`.

        eps defaults to eps_m for the explicit family. With `flatten` the map is
        flattened on |x| <= eps and the box graph is built at `markov_level`
        (default: the return generation).

        Raises:
            ConfigError: If eps is missing for a user family.
            PreconditionError: If eps or the budget are out of range.
        """
        F = skew_map_for(config.family)
        eps = default_eps(F, config.eps)
        events: list[BaseEvent] = []

        sinks: list[SinkRecord] = []
        if config.census:
            sinks = sink_census(F, Region(), config.max_period)
            events.append(SinkCensusCompleted(sinks=len(sinks), max_period=config.max_period))
        report = quasi_critical_returns(F, eps, config.generation, config.budget, sinks)
        events.append(
            ReturnsClassified(
                points=len(report.outcomes),
                m0_observed=report.m0_observed,
                budget_exceeded=report.count(ReturnVerdict.BUDGET_EXCEEDED),
            )
        )
        data: dict[str, Any] = {
            "family": F.to_dict(),
            "returns": report.to_dict(),
            "sinks": [s.to_dict() for s in sinks],
            "flattening": None,
        }

        if config.flatten:
            G = flatten(F, eps)
            level = config.markov_level if config.markov_level is not None else config.generation
            graph = box_absorption(G, eps, level, sinks=sinks)
            events.append(
                BoxGraphBuilt(
                    boxes=len(graph.boxes),
                    cycles=len(graph.cycles),
                    unresolved=len(graph.unresolved),
                )
            )
            data["flattening"] = {
                "distance": flatten_distance(F, eps).to_dict(),
                "box_graph": graph.to_dict(),
            }
        self.event_dispatcher.dispatch(events)

        rows = [[o.to_row()[c] for c in RETURN_COLUMNS] for o in report.outcomes]
        result = CommandResult(
            summary={
                "eps": eps,
                "m0_observed": report.m0_observed,
                "derived": F.params.to_dict() if F.params else {},
            }
        )
        result.reports["returns"] = self.publisher.csv(run_id, "returns.csv", RETURN_COLUMNS, rows)
        result.reports["returns_summary"] = self.publisher.json(run_id, "returns.json", data)
        return result
