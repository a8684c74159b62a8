"""This module defines the domain events for the application."""

import uuid
from dataclasses import dataclass, field
from datetime import UTC, datetime
from typing import Protocol

from newhouse_lab.domain.ids import RunId


class Event(Protocol):
    """A protocol that all domain events must adhere to."""

    @property
    def event_id(self) -> uuid.UUID:
        """The unique identifier of the event."""
        ...  # pragma: no cover

    @property
    def timestamp(self) -> datetime:
        """The UTC timestamp when the event was created."""
        ...  # pragma: no cover


@dataclass(frozen=True, kw_only=True)
class BaseEvent:
    """A base class for domain events, providing common fields."""

    event_id: uuid.UUID = field(default_factory=uuid.uuid4)
    timestamp: datetime = field(default_factory=lambda: datetime.now(UTC))


@dataclass(frozen=True)
class ThicknessMeasured(BaseEvent):
    """Fired when the thickness of a cover has been computed."""

    label: str
    generation: int
    tau: float


@dataclass(frozen=True)
class GapLemmaDecided(BaseEvent):
    """Fired when the gap lemma has been applied to two covers."""

    outcome: str
    tau_product: float
    link: str


@dataclass(frozen=True)
class CertificateIssued(BaseEvent):
    """Fired when the certificate pipeline finishes for one (t, m) instance."""

    t: float
    m: int
    status: str
    reason: str
    tau_product: float


@dataclass(frozen=True)
class HyperbolicityAssessed(BaseEvent):
    """Fired after the cone, growth and stable checks on a sample."""

    samples: int
    max_slope_ratio: float
    violations_outside_basins: int
    growth_failures: int


@dataclass(frozen=True)
class SinkCensusCompleted(BaseEvent):
    """Fired when a sink census finishes."""

    sinks: int
    max_period: int


@dataclass(frozen=True)
class ReturnsClassified(BaseEvent):
    """Fired when quasi-critical returns have been classified."""

    points: int
    m0_observed: int
    budget_exceeded: int


@dataclass(frozen=True)
class BoxGraphBuilt(BaseEvent):
    """Fired when the box absorption graph of a flattened map is built."""

    boxes: int
    cycles: int
    unresolved: int


@dataclass(frozen=True)
class SweepCompleted(BaseEvent):
    """Fired when a certificate sensitivity sweep finishes."""

    instances: int
    certified: int


@dataclass(frozen=True)
class ReportWritten(BaseEvent):
    """Fired whenever a report file has been written atomically."""

    run_id: RunId
    path: str
    kind: str
