"""This module defines type aliases and constructors for all domain-specific IDs.

IDs are name-based (uuid5) so that identical runs produce identical reports.
"""

import uuid
from typing import NewType

RunId = NewType("RunId", uuid.UUID)
SinkId = NewType("SinkId", uuid.UUID)
BoxId = NewType("BoxId", uuid.UUID)

LAB_NAMESPACE = uuid.UUID("6f1d9a52-3c07-5e8b-9b41-2a7c0e5d8f13")


def run_id_for(manifest_key: str) -> RunId:
    """Derive the run id from the canonical JSON of the resolved parameters."""
    return RunId(uuid.uuid5(LAB_NAMESPACE, f"run:{manifest_key}"))


def sink_id_for(period: int, x: float, y: float) -> SinkId:
    """Derive a sink id from its period and phase-aligned first point."""
    return SinkId(uuid.uuid5(LAB_NAMESPACE, f"sink:{period}:{x:.10f}:{y:.10f}"))


def box_id_for(level: int, word: tuple[int, ...], side: str) -> BoxId:
    """Derive a box id from the Markov word of its y-interval and its side."""
    symbols = ".".join(str(s) for s in word)
    return BoxId(uuid.uuid5(LAB_NAMESPACE, f"box:{level}:{symbols}:{side}"))
