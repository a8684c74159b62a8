"""This module provides a small structured logging service.

`LoggingService` filters entries by level and fans them out to one or more
`LogWriter` implementations. Both writers emit one JSON object per line so the
run log can be parsed back.
"""

import json
import os
import sys
from datetime import UTC, datetime
from typing import Any, Optional, Protocol, TextIO

from newhouse_lab.ports.service_interfaces import LoggingServiceInterface

LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40}


class LogWriter(Protocol):
    """A protocol for log writing strategies."""

    def write(self, entry: dict[str, Any]) -> None:
        """Writes one log entry."""
        ...  # pragma: no cover


def _line(entry: dict[str, Any]) -> str:
    return json.dumps(entry, sort_keys=True, default=str)


class ConsoleLogWriter:
    """A LogWriter that prints single-line JSON to stderr."""

    def __init__(self, stream: Optional[TextIO] = None) -> None:
        self._stream = stream

    def write(self, entry: dict[str, Any]) -> None:
        """Write the entry to the stream (stderr by default)."""
        print(_line(entry), file=self._stream or sys.stderr)


class JsonLinesFileLogWriter:
    """A LogWriter that appends entries to a JSON-lines file.

    Args:
        path (str): The log file; its directory is created on first write.
    """

    def __init__(self, path: str) -> None:
        self.path = path

    def write(self, entry: dict[str, Any]) -> None:
        """Append the entry as one line."""
        os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
        with open(self.path, "a", encoding="utf-8", newline="\n") as f:
            f.write(_line(entry) + "\n")


class LoggingService(LoggingServiceInterface):
    """Dispatches log entries at or above `level` to every registered writer.

    Args:
        writers (Optional[list[LogWriter]]): Initial writers.
        level (str): Minimum level name; unknown names count as INFO.
    """

    def __init__(self, writers: Optional[list[LogWriter]] = None, level: str = "INFO") -> None:
        self._writers = list(writers or [])
        self._threshold = LEVELS.get(level.upper(), LEVELS["INFO"])

    def register(self, writer: LogWriter) -> None:
        """Register a new log writer."""
        self._writers.append(writer)

    def log(self, message: str, data: dict[str, Any], level: str = "INFO") -> None:
        """Send a log entry to all writers unless it is below the threshold."""
        if LEVELS.get(level.upper(), LEVELS["INFO"]) < self._threshold:
            return
        entry = {
            "timestamp": datetime.now(UTC).isoformat(),
            "level": level.upper(),
            "message": message,
            "data": data,
        }
        for writer in self._writers:
            writer.write(entry)
