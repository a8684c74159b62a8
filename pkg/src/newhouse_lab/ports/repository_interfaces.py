"""This module defines the interfaces for report and config persistence.

In a Hexagonal Architecture, these interfaces act as the "driven ports" for the
application core. Infrastructure adapters implement them.
"""

from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:  # pragma: no cover
    from newhouse_lab.domain.interval_cantor import MarkovSystem


class ReportRepositoryInterface(ABC):
    """Writes the deterministic outputs of a run into one directory."""

    @property
    @abstractmethod
    def root(self) -> str:
        """The output directory."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def write_json(self, name: str, data: dict[str, Any]) -> str:
        """Write `data` as canonical JSON and return the file path."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def write_csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> str:
        """Write a CSV table and return the file path."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def write_text(self, name: str, text: str) -> str:
        """Write a text file (SVG) and return the file path."""
        raise NotImplementedError  # pragma: no cover


class ConfigRepositoryInterface(ABC):
    """Reads run configurations and Markov systems."""

    @abstractmethod
    def load(self, path: str) -> dict[str, Any]:
        """Read a JSON config object."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def load_system(self, path: str) -> "MarkovSystem":
        """Read a MarkovSystem in its JSON branch form."""
        raise NotImplementedError  # pragma: no cover
