"""Returns of quasi-critical points, flattening of the critical strip, and boxes.

Quasi-critical points (+-eps, y) with y in K_0 are followed until they come
back into the open strip |x| < eps. Flattening replaces f on the closed strip
by its boundary value, which makes every strip box collapse to one horizontal
value; following these boxes yields a finite graph whose cycles are
super-attracting periodic orbits.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Optional

import numpy as np

from newhouse_lab.domain.bc_family import (
    FamilyKind,
    FlattenedFamily,
    Side,
    SkewMap,
    SkewPoint,
    UndoneFamily,
)
from newhouse_lab.domain.errors import NewhouseLabError, PreconditionError
from newhouse_lab.domain.hyperbolicity import SinkRecord, cocycle_trace, contraction_radius
from newhouse_lab.domain.ids import BoxId, SinkId, box_id_for, sink_id_for
from newhouse_lab.domain.interval_cantor import Interval, Word, refine

BOUNDARY_TOL = 1e-9


class ReturnVerdict(StrEnum):
    """How the orbit of a quasi-critical point ended."""

    RETURNED_AFTER = "ReturnedAfter"
    SINK_BASIN = "SinkBasin"
    BUDGET_EXCEEDED = "BudgetExceeded"
    HIT_CRITICAL_LINE = "HitCriticalLine"


@dataclass(frozen=True)
class ReturnOutcome:
    """The classification of one quasi-critical point."""

    point: SkewPoint
    verdict: ReturnVerdict
    trace_length: int
    m_y: Optional[int] = None
    sink_id: Optional[SinkId] = None
    trace: tuple[SkewPoint, ...] = ()

    def to_row(self) -> dict[str, Any]:
        """Flatten the outcome into a CSV row."""
        return {
            "x": self.point.x,
            "y": self.point.y,
            "verdict": str(self.verdict),
            "m_y": "" if self.m_y is None else self.m_y,
            "sink_id": "" if self.sink_id is None else str(self.sink_id),
            "trace_length": self.trace_length,
        }


@dataclass(frozen=True)
class ReturnsReport:
    """All outcomes and the largest observed return time."""

    eps: float
    generation: int
    budget: int
    outcomes: list[ReturnOutcome]

    @property
    def m0_observed(self) -> int:
        """The largest return time among ReturnedAfter verdicts (0 if none)."""
        times = [o.m_y for o in self.outcomes if o.m_y is not None]
        return max(times, default=0)

    def count(self, verdict: ReturnVerdict) -> int:
        """Count outcomes with the given verdict."""
        return sum(1 for o in self.outcomes if o.verdict is verdict)

    def to_dict(self) -> dict[str, Any]:
        """Serialize a summary of the report."""
        return {
            "eps": self.eps,
            "generation": self.generation,
            "budget": self.budget,
            "points": len(self.outcomes),
            "m0_observed": self.m0_observed,
            "verdicts": {str(v): self.count(v) for v in ReturnVerdict},
        }


def _near_sink(p: SkewPoint, sinks: Sequence[SinkRecord], tol: float) -> Optional[SinkId]:
    for sink in sinks:
        for q in sink.orbit:
            if abs(p.x - q.x) <= tol and abs(p.y - q.y) <= tol:
                return sink.sink_id
    return None


def classify_return(
    F: SkewMap,
    start: SkewPoint,
    eps: float,
    budget: int,
    sinks: Sequence[SinkRecord] = (),
    sink_tol: float = 1e-6,
    boundary_tol: float = BOUNDARY_TOL,
) -> ReturnOutcome:
    """Follow one start until it re-enters |x| < eps - boundary_tol."""
    trace = [start]
    point = start
    for step in range(1, budget + 1):
        if point.x == 0.0 and point.side is Side.NONE:
            return ReturnOutcome(
                start, ReturnVerdict.HIT_CRITICAL_LINE, len(trace) - 1, trace=tuple(trace)
            )
        point = F.eval(point)
        trace.append(point)
        if abs(point.x) < eps - boundary_tol:
            return ReturnOutcome(
                start, ReturnVerdict.RETURNED_AFTER, step, m_y=step, trace=tuple(trace)
            )
        owner = _near_sink(point, sinks, sink_tol)
        if owner is not None:
            return ReturnOutcome(
                start, ReturnVerdict.SINK_BASIN, step, sink_id=owner, trace=tuple(trace)
            )
    return ReturnOutcome(start, ReturnVerdict.BUDGET_EXCEEDED, budget, trace=tuple(trace))


def quasi_critical_returns(
    F: SkewMap,
    eps: float,
    g: int,
    budget: int,
    sinks: Sequence[SinkRecord] = (),
    boundary_tol: float = BOUNDARY_TOL,
) -> ReturnsReport:
    """Classify (+-eps, y) for every endpoint y of the generation-g K_0 cover.

    A return is counted only strictly inside the strip, `boundary_tol` away
    from its edge, so orbits that run along x = +-eps are not mistaken for
    returns.

    Raises:
        PreconditionError: If eps is not positive or the budget is negative.
    """
    if not eps > 0.0:
        raise PreconditionError(f"eps must be positive, got {eps!r}")
    if budget < 0:
        raise PreconditionError(f"budget must be >= 0, got {budget}")
    cover = refine(F.vertical.system, g)
    ys = np.unique(np.concatenate([cover.lo, cover.hi]))
    outcomes = [
        classify_return(F, SkewPoint(sign * eps, float(y)), eps, budget, sinks, 1e-6, boundary_tol)
        for y in ys
        for sign in (1.0, -1.0)
    ]
    return ReturnsReport(eps, g, budget, outcomes)


# --- Flattening ---


def flatten(F: SkewMap, eps: float) -> SkewMap:
    """Return G, equal to F off the closed strip and flat in x on it.

    Raises:
        PreconditionError: If eps is not in (0, 1).
    """
    if not 0.0 < eps < 1.0:
        raise PreconditionError(f"flattening width must lie in (0, 1), got {eps!r}")
    return SkewMap(
        kind=FamilyKind.FLATTENED,
        x_family=FlattenedFamily(F.x_family, eps),
        vertical=F.vertical,
        params=F.params,
        strip=eps,
    )


def undo_flatten(
    G: SkewMap, eps_undo: Optional[float] = None, height: Optional[float] = None
) -> SkewMap:
    """Put a sharp cubic bump of half-width eps_undo back on top of a flat strip.

    Defaults are eps_undo = eps/10 and height = eps_undo^2.

    Raises:
        PreconditionError: If G is not a flattened map.
    """
    if G.kind is not FamilyKind.FLATTENED or not isinstance(G.x_family, FlattenedFamily):
        raise PreconditionError("undo_flatten needs a flattened map")
    width = eps_undo if eps_undo is not None else G.strip / 10.0
    return SkewMap(
        kind=FamilyKind.UNDONE,
        x_family=UndoneFamily(G.x_family, width, height if height is not None else width * width),
        vertical=G.vertical,
        params=G.params,
        strip=G.strip,
    )


@dataclass(frozen=True)
class FlattenDistance:
    """How far the flattened map moves F on the strip."""

    eps: float
    sup_distance: float
    derivative_bound: float

    def to_dict(self) -> dict[str, Any]:
        """Serialize the distances."""
        return {
            "eps": self.eps,
            "sup_distance": self.sup_distance,
            "derivative_bound": self.derivative_bound,
        }


def flatten_distance(F: SkewMap, eps: float, samples: int = 401) -> FlattenDistance:
    """Sample sup |f(x, y) - f(sgn(x) eps, y)| and sup |f_x| * eps on the strip."""
    xs = np.linspace(-eps, eps, samples)
    gx, gy = np.meshgrid(xs, np.linspace(0.0, 1.0, 65))
    clamped = np.copysign(eps, gx)
    gap = np.abs(F.x_family.value(gx, gy) - F.x_family.value(clamped, gy))
    slope = np.abs(F.x_family.dx(gx, gy))
    return FlattenDistance(eps, float(np.max(gap)), float(np.max(slope)) * eps)


# --- Boxes ---


class BoxStatus(StrEnum):
    """How the representative fiber of a box ended."""

    RETURNED = "Returned"
    SINK = "Sink"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Box:
    """The half-box [0, +-eps] x I_l over one Markov cylinder of K_0."""

    box_id: BoxId
    word: Word
    interval: Interval
    side: Side

    def to_dict(self) -> dict[str, Any]:
        """Serialize the box."""
        return {
            "box_id": str(self.box_id),
            "word": list(self.word),
            "interval": self.interval.to_list(),
            "side": str(self.side),
        }


@dataclass(frozen=True)
class BoxEdge:
    """Where the representative fiber of a box goes."""

    box_id: BoxId
    status: BoxStatus
    r: int
    target: Optional[BoxId] = None
    sink_id: Optional[SinkId] = None
    entry_x: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        """Serialize the edge as an adjacency entry."""
        return {
            "box_id": str(self.box_id),
            "image_box_id": str(self.target) if self.target is not None else None,
            "sink_id": str(self.sink_id) if self.sink_id is not None else None,
            "r_l": self.r,
            "status": str(self.status),
        }


@dataclass(frozen=True)
class BoxGraph:
    """The induced graph on strip boxes and the cycles it contains."""

    eps: float
    markov_level: int
    boxes: list[Box]
    edges: list[BoxEdge]
    cycles: list[SinkRecord] = field(default_factory=list)

    @property
    def unresolved(self) -> list[BoxId]:
        """Boxes whose fiber ran out of budget or hit x = 0."""
        return [e.box_id for e in self.edges if e.status is BoxStatus.UNRESOLVED]

    def to_dict(self) -> dict[str, Any]:
        """Serialize boxes, adjacency and cycles."""
        return {
            "eps": self.eps,
            "markov_level": self.markov_level,
            "boxes": [b.to_dict() for b in self.boxes],
            "adjacency": [e.to_dict() for e in self.edges],
            "cycles": [c.to_dict() for c in self.cycles],
            "unresolved": [str(b) for b in self.unresolved],
        }


def _locate(boxes: list[Box], fiber: Interval, side: Side, tol: float) -> Optional[Box]:
    for box in boxes:
        if box.side is side and box.interval.contains_interval(fiber, tol):
            return box
    return None


def _follow_box(
    G: SkewMap,
    box: Box,
    boxes: list[Box],
    eps: float,
    budget: int,
    sinks: Sequence[SinkRecord],
    tol: float,
) -> BoxEdge:
    sign = 1.0 if box.side is Side.PLUS else -1.0
    lo, hi = box.interval.lo, box.interval.hi
    mid = box.interval.midpoint
    x = sign * eps
    for step in range(1, budget + 1):
        s = 1.0 if x > 0.0 else -1.0
        x_next = float(G.x_family.value(x, mid))
        lo, hi = sorted(float(v) for v in G.vertical.k(np.array([lo, hi]), s))
        mid = float(G.vertical.k(mid, s))
        x = x_next
        if abs(x) <= eps:
            if x == 0.0:
                return BoxEdge(box.box_id, BoxStatus.UNRESOLVED, step)
            side = Side.PLUS if x > 0.0 else Side.MINUS
            target = _locate(boxes, Interval(lo, hi), side, tol)
            if target is None:
                return BoxEdge(box.box_id, BoxStatus.UNRESOLVED, step)
            return BoxEdge(box.box_id, BoxStatus.RETURNED, step, target=target.box_id, entry_x=x)
        owner = _near_sink(SkewPoint(x, mid), sinks, 1e-6)
        if owner is not None:
            return BoxEdge(box.box_id, BoxStatus.SINK, step, sink_id=owner)
    return BoxEdge(box.box_id, BoxStatus.UNRESOLVED, budget)


def _cycles(edges: dict[BoxId, BoxEdge], order: list[BoxId]) -> list[list[BoxId]]:
    color: dict[BoxId, int] = {}
    found: list[list[BoxId]] = []
    for start in order:
        path: list[BoxId] = []
        node: Optional[BoxId] = start
        while node is not None and node not in color:
            color[node] = 1
            path.append(node)
            node = edges[node].target
        if node is not None and color.get(node) == 1 and node in path:
            found.append(path[path.index(node) :])
        for visited in path:
            color[visited] = 2
    return found


def _cycle_orbit(
    G: SkewMap,
    boxes: dict[BoxId, Box],
    cycle: list[BoxId],
    edges: dict[BoxId, BoxEdge],
    eps: float,
    lambda2: float,
) -> Optional[SinkRecord]:
    period = sum(edges[b].r for b in cycle)
    first = boxes[cycle[0]]
    sign = 1.0 if first.side is Side.PLUS else -1.0
    point = SkewPoint(0.5 * sign * eps, first.interval.midpoint)
    try:
        for _ in range(40 * period):
            point = G.eval(point)
        for _ in range(period):
            if abs(point.x) <= eps:
                break
            point = G.eval(point)
        rows = cocycle_trace(G, point, period)
    except NewhouseLabError:
        return None
    orbit = [SkewPoint(r.point.x, r.point.y) for r in rows[:-1]]
    state = rows[-1].state
    return SinkRecord(
        sink_id=sink_id_for(period, orbit[0].x, orbit[0].y),
        period=period,
        orbit=orbit,
        x_multiplier=state.A,
        y_multiplier=state.D,
        contraction_radius=contraction_radius(G, orbit[0], period, lambda2),
    )


def box_absorption(
    G: SkewMap,
    eps: float,
    markov_level: int,
    budget: int = 200,
    sinks: Sequence[SinkRecord] = (),
    tol: float = 1e-12,
    lambda2: float = 0.96,
) -> BoxGraph:
    """Follow every strip box of a flattened map until it lands in another box.

    Boxes are the half-boxes [0, eps] x I and [-eps, 0] x I over the cylinders
    I of the level-`markov_level` K_0 cover. Flatness makes the x-image of a
    box a single value, so each box is followed as one (x, y-interval) fiber.

    Raises:
        PreconditionError: If G is not flat on the strip |x| <= eps.
    """
    if G.kind is not FamilyKind.FLATTENED or G.strip < eps:
        raise PreconditionError("box absorption needs a map flattened on |x| <= eps")
    if markov_level < 0:
        raise PreconditionError(f"markov_level must be >= 0, got {markov_level}")
    cover = refine(G.vertical.system, markov_level)
    boxes = [
        Box(box_id_for(markov_level, word, str(side)), word, interval, side)
        for word, interval in zip(cover.words, cover.intervals, strict=True)
        for side in (Side.PLUS, Side.MINUS)
    ]
    edges = [_follow_box(G, box, boxes, eps, budget, sinks, tol) for box in boxes]
    by_id = {e.box_id: e for e in edges}
    box_by_id = {b.box_id: b for b in boxes}
    cycles = []
    for cycle in _cycles(by_id, [b.box_id for b in boxes]):
        record = _cycle_orbit(G, box_by_id, cycle, by_id, eps, lambda2)
        if record is not None:
            cycles.append(record)
    return BoxGraph(eps, markov_level, boxes, edges, cycles)
