"""This module defines the interfaces for all application services.

In a Hexagonal Architecture, these interfaces act as the "driving ports" for the
application core. The CLI depends only on them.
"""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import TYPE_CHECKING, Any, Optional

if TYPE_CHECKING:  # pragma: no cover
    from newhouse_lab.application.dtos import (
        CertifyRunConfig,
        CommandResult,
        GapLemmaRunConfig,
        HyperRunConfig,
        OrbitRunConfig,
        PlotRunConfig,
        ReturnsRunConfig,
        SweepRow,
        SweepRunConfig,
        ThicknessRunConfig,
    )
    from newhouse_lab.domain.bc_family import LineOfTangencies, SkewPoint
    from newhouse_lab.domain.gap_lemma import IntersectionWitness
    from newhouse_lab.domain.ids import RunId
    from newhouse_lab.domain.interval_cantor import CantorApproximation


class LoggingServiceInterface(ABC):
    """Defines the interface for the structured logging service."""

    @abstractmethod
    def log(self, message: str, data: dict[str, Any], level: str = "INFO") -> None:
        """Log a message with structured data."""
        raise NotImplementedError  # pragma: no cover


class PlotterInterface(ABC):
    """Renders figures as self-contained SVG text."""

    @abstractmethod
    def render_cover(self, cover: "CantorApproximation", title: str) -> str:
        """Draw the intervals of a cover and mark its gaps."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def render_tangency(
        self,
        stable: "CantorApproximation",
        unstable: "CantorApproximation",
        line: "LineOfTangencies",
        witness: "Optional[IntersectionWitness]",
        orbit: "Sequence[SkewPoint]",
    ) -> str:
        """Draw both projected covers, the line L+, the witness and an orbit."""
        raise NotImplementedError  # pragma: no cover


class ThicknessServiceInterface(ABC):
    """Use cases on dynamically defined Cantor sets."""

    @abstractmethod
    def thickness(self, config: "ThicknessRunConfig", run_id: "RunId") -> "CommandResult":
        """Refine a system, measure thickness and write the report."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def gap_lemma(self, config: "GapLemmaRunConfig", run_id: "RunId") -> "CommandResult":
        """Decide the gap lemma for two systems and write the report."""
        raise NotImplementedError  # pragma: no cover


class CertificationServiceInterface(ABC):
    """Use cases around the non-hyperbolicity certificate."""

    @abstractmethod
    def certify(self, config: "CertifyRunConfig", run_id: "RunId") -> "CommandResult":
        """Run the certificate pipeline and write the certificate."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def sensitivity_sweep(
        self, ts: Sequence[float], ms: Sequence[int], c_rhos: Sequence[float], g: int
    ) -> "list[SweepRow]":
        """Compute thickness and linking over a parameter grid."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def sweep(self, config: "SweepRunConfig", run_id: "RunId") -> "CommandResult":
        """Run the sensitivity sweep and write the table."""
        raise NotImplementedError  # pragma: no cover


class HyperbolicityServiceInterface(ABC):
    """Use cases of the hyperbolicity diagnostics."""

    @abstractmethod
    def assess(self, config: "HyperRunConfig", run_id: "RunId") -> "CommandResult":
        """Sample, census and check a skew map, then write the reports."""
        raise NotImplementedError  # pragma: no cover


class CriticalDynamicsServiceInterface(ABC):
    """Use cases on quasi-critical returns and flattening."""

    @abstractmethod
    def returns(self, config: "ReturnsRunConfig", run_id: "RunId") -> "CommandResult":
        """Classify returns, optionally flatten and build the box graph."""
        raise NotImplementedError  # pragma: no cover


class OrbitServiceInterface(ABC):
    """Use cases producing orbit traces and figures."""

    @abstractmethod
    def orbit(self, config: "OrbitRunConfig", run_id: "RunId") -> "CommandResult":
        """Write the orbit trace with its cocycle entries."""
        raise NotImplementedError  # pragma: no cover

    @abstractmethod
    def plot(self, config: "PlotRunConfig", run_id: "RunId") -> "CommandResult":
        """Write the tangency figure and its data."""
        raise NotImplementedError  # pragma: no cover
