"""Writes reports through the repository and announces each file."""

from collections.abc import Iterable, Sequence
from typing import Any

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.domain.events import ReportWritten
from newhouse_lab.domain.ids import RunId
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface


class ReportPublisher:
    """Pairs every report write with a `ReportWritten` event.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
    """

    def __init__(
        self, report_repo: ReportRepositoryInterface, event_dispatcher: EventDispatcher
    ) -> None:
        self.report_repo = report_repo
        self.event_dispatcher = event_dispatcher

    def _announce(self, run_id: RunId, path: str, kind: str) -> str:
        self.event_dispatcher.dispatch([ReportWritten(run_id=run_id, path=path, kind=kind)])
        return path

    @emits(ReportWritten)
    def json(self, run_id: RunId, name: str, data: dict[str, Any]) -> str:
        """Write a JSON report."""
        return self._announce(run_id, self.report_repo.write_json(name, data), "json")

    @emits(ReportWritten)
    def csv(
        self, run_id: RunId, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> str:
        """Write a CSV table."""
        return self._announce(run_id, self.report_repo.write_csv(name, header, rows), "csv")

    @emits(ReportWritten)
    def svg(self, run_id: RunId, name: str, text: str) -> str:
        """Write an SVG figure."""
        return self._announce(run_id, self.report_repo.write_text(name, text), "svg")
