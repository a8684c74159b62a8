"""A filesystem implementation of the report repository interface."""

import csv
import io
import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, np.generic):
        return value.item()
    return value


class FilesystemReportRepository(ReportRepositoryInterface):
    """Writes reports into `base_path`, each file atomically (temp file + rename).

    JSON is written with sorted keys and four-space indentation; CSV uses ','
    separators and LF line endings.

    Args:
        base_path (str): The output directory, created if missing.
    """

    def __init__(self, base_path: str) -> None:
        self._base_path = base_path
        os.makedirs(self._base_path, exist_ok=True)

    @property
    def root(self) -> str:
        """The output directory."""
        return self._base_path

    def _get_path(self, name: str) -> str:
        return os.path.join(self._base_path, name)

    def _write_atomic(self, name: str, text: str) -> str:
        path = self._get_path(name)
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self._base_path)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def write_json(self, name: str, data: dict[str, Any]) -> str:
        """Write `data` as canonical JSON."""
        text = json.dumps(data, indent=4, sort_keys=True, default=_plain)
        return self._write_atomic(name, text + "\n")

    def write_csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> str:
        """Write a CSV table; None cells are written empty."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return self._write_atomic(name, buffer.getvalue())

    def write_text(self, name: str, text: str) -> str:
        """Write a text file as is."""
        return self._write_atomic(name, text)
