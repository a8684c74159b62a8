"""Linking, the gap-lemma decision, and constructive intersection witnesses."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Optional

import numpy as np

from newhouse_lab.domain.errors import (
    DepthExceeded,
    IntersectionNotFound,
    NotLinked,
    ThicknessCollapse,
)
from newhouse_lab.domain.interval_cantor import (
    CantorApproximation,
    FloatArray,
    Interval,
    Word,
    children,
    thickness,
    thickness_of_arrays,
)

PRODUCT_MARGIN = 1e-9


class LinkCase(StrEnum):
    """The mutually exclusive linking cases of two Cantor sets."""

    LINKED = "Linked"
    FIRST_IN_GAP_OF_SECOND = "FirstInGapOfSecond"
    SECOND_IN_GAP_OF_FIRST = "SecondInGapOfFirst"
    DISJOINT_HULLS = "DisjointHulls"


class GapLemmaOutcome(StrEnum):
    """The gap-lemma alternatives, plus the Inconclusive marker.

    `DISJOINT` means both containment alternatives hold at once (each hull lies
    in an unbounded gap of the other set).
    """

    INTERSECT = "Intersect"
    FIRST_IN_GAP_OF_SECOND = "FirstInGapOfSecond"
    SECOND_IN_GAP_OF_FIRST = "SecondInGapOfFirst"
    DISJOINT = "Disjoint"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LinkVerdict:
    """A linking verdict, labelled with the generations it was decided at."""

    case: LinkCase
    generations: tuple[int, int]

    def to_dict(self) -> dict[str, Any]:
        """Serialize the verdict."""
        return {"case": str(self.case), "generations": list(self.generations)}


@dataclass(frozen=True)
class GapLemmaDecision:
    """The outcome of the gap-lemma decision procedure."""

    outcome: GapLemmaOutcome
    tau_product: float
    tau_a: float
    tau_b: float
    link: LinkVerdict

    def to_dict(self) -> dict[str, Any]:
        """Serialize the decision."""
        return {
            "case": str(self.outcome),
            "tau_product": self.tau_product,
            "tau_a": self.tau_a,
            "tau_b": self.tau_b,
            "link": self.link.to_dict(),
            "generations": list(self.link.generations),
        }


@dataclass(frozen=True)
class IntersectionWitness:
    """A point whose enclosure meets a deep cylinder of both sets."""

    point: float
    enclosure: Interval
    depth: int
    word_a: Word
    word_b: Word
    nodes_visited: int = 0
    linked_at: tuple[int, int] = (0, 0)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the witness."""
        return {
            "point": self.point,
            "enclosure": self.enclosure.to_list(),
            "depth": self.depth,
            "word_a": list(self.word_a),
            "word_b": list(self.word_b),
            "linked_at": list(self.linked_at),
        }


def _in_gap(lo: float, hi: float, other_lo: FloatArray, other_hi: FloatArray) -> bool:
    i = int(np.searchsorted(other_lo, hi, side="right")) - 1
    return i < 0 or float(other_hi[i]) < lo


def _link_case(
    lo_a: FloatArray, hi_a: FloatArray, lo_b: FloatArray, hi_b: FloatArray
) -> LinkCase:
    """Linking case of two sorted covers given as interval arrays."""
    ha = (float(lo_a[0]), float(hi_a[-1]))
    hb = (float(lo_b[0]), float(hi_b[-1]))
    if ha[1] < hb[0] or hb[1] < ha[0]:
        return LinkCase.DISJOINT_HULLS
    if _in_gap(*ha, lo_b, hi_b):
        return LinkCase.FIRST_IN_GAP_OF_SECOND
    if _in_gap(*hb, lo_a, hi_a):
        return LinkCase.SECOND_IN_GAP_OF_FIRST
    return LinkCase.LINKED


def link_verdict(a: CantorApproximation, b: CantorApproximation) -> LinkVerdict:
    """Decide linking of two covers using their gaps and unbounded rays."""
    return LinkVerdict(_link_case(a.lo, a.hi, b.lo, b.hi), (a.generation, b.generation))


_OUTCOME_FOR_CASE = {
    LinkCase.LINKED: GapLemmaOutcome.INTERSECT,
    LinkCase.FIRST_IN_GAP_OF_SECOND: GapLemmaOutcome.FIRST_IN_GAP_OF_SECOND,
    LinkCase.SECOND_IN_GAP_OF_FIRST: GapLemmaOutcome.SECOND_IN_GAP_OF_FIRST,
    LinkCase.DISJOINT_HULLS: GapLemmaOutcome.DISJOINT,
}


def gap_lemma_decide(a: CantorApproximation, b: CantorApproximation) -> GapLemmaDecision:
    """Apply the gap lemma at the covers' generations.

    A thickness product within `PRODUCT_MARGIN` of 1 or below is Inconclusive.

    Raises:
        NoBoundedGap: If either cover is a single interval.
    """
    tau_a = thickness(a).tau
    tau_b = thickness(b).tau
    product = tau_a * tau_b
    link = link_verdict(a, b)
    if product <= 1.0 + PRODUCT_MARGIN:
        outcome = GapLemmaOutcome.INCONCLUSIVE
    else:
        outcome = _OUTCOME_FOR_CASE[link.case]
    return GapLemmaDecision(outcome, product, tau_a, tau_b, link)


@dataclass(frozen=True)
class _Node:
    word_a: Word
    interval_a: Interval
    word_b: Word
    interval_b: Interval
    tau_a: float
    tau_b: float

    @property
    def overlap(self) -> float:
        return min(self.interval_a.hi, self.interval_b.hi) - max(
            self.interval_a.lo, self.interval_b.lo
        )


def _overlapping_roots(
    a: CantorApproximation, b: CantorApproximation, tau_a: float, tau_b: float
) -> list[_Node]:
    nodes: list[_Node] = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a.hi[i] < b.lo[j]:
            i += 1
        elif b.hi[j] < a.lo[i]:
            j += 1
        else:
            nodes.append(
                _Node(
                    a.words[i],
                    Interval(float(a.lo[i]), float(a.hi[i])),
                    b.words[j],
                    Interval(float(b.lo[j]), float(b.hi[j])),
                    tau_a,
                    tau_b,
                )
            )
            if a.hi[i] < b.hi[j]:
                i += 1
            else:
                j += 1
    return nodes


def _kid_arrays(
    kids: list[tuple[Word, Interval]], fallback: Interval
) -> tuple[FloatArray, FloatArray]:
    if not kids:
        return np.array([fallback.lo]), np.array([fallback.hi])
    return np.array([k[1].lo for k in kids]), np.array([k[1].hi for k in kids])


def _local_tau(kids: list[tuple[Word, Interval]]) -> Optional[float]:
    if len(kids) < 2:
        return None
    lo, hi = _kid_arrays(kids, kids[0][1])
    births = np.zeros(len(kids) - 1, dtype=np.int64)
    return thickness_of_arrays(lo, hi, births, 0).tau


def intersect_refine(
    a: CantorApproximation,
    b: CantorApproximation,
    tol: float,
    max_depth: int,
    max_nodes: int = 200_000,
) -> IntersectionWitness:
    """Descend linked cylinder pairs until a common enclosure of width <= tol.

    Every popped pair is re-checked for linking on the next-generation
    sub-covers of both cylinders and dropped unless Linked. The longer of the
    two cylinders is then refined (ties refine `a`), and child pairs are
    explored depth-first in order of decreasing overlap. Each pair carries its
    own local thicknesses; a pair whose local product drops to <= 1 is pruned.

    Args:
        a (CantorApproximation): The first cover.
        b (CantorApproximation): The second cover.
        tol (float): Target width of both final cylinders.
        max_depth (int): Deepest cylinder generation allowed.
        max_nodes (int): Budget of explored cylinder pairs.

    Returns:
        IntersectionWitness: The witness point and its enclosure.

    Raises:
        NotLinked: If the covers are not linked.
        DepthExceeded: If the depth or node budget is exhausted.
        ThicknessCollapse: If the product started above 1 and the search ran
            dry after pruning pairs whose local product fell to <= 1. Carries
            the smallest product seen and the depth it was seen at.
        IntersectionNotFound: If every cylinder pair was pruned otherwise.
    """
    decision = gap_lemma_decide(a, b)
    if decision.link.case is not LinkCase.LINKED:
        raise NotLinked(f"covers are not linked: {decision.link.case}")
    guard = decision.tau_product > 1.0 + PRODUCT_MARGIN

    stack = sorted(
        _overlapping_roots(a, b, decision.tau_a, decision.tau_b), key=lambda n: n.overlap
    )
    visited = 0
    deepest = max(a.generation, b.generation)
    budget_hit = False
    collapse: Optional[tuple[int, float]] = None
    while stack:
        node = stack.pop()
        visited += 1
        if visited > max_nodes:
            raise DepthExceeded(deepest)
        depth_a = len(node.word_a) - 1
        depth_b = len(node.word_b) - 1
        deepest = max(deepest, depth_a, depth_b)
        kids_a = children(a, node.word_a)
        kids_b = children(b, node.word_b)
        case = _link_case(
            *_kid_arrays(kids_a, node.interval_a), *_kid_arrays(kids_b, node.interval_b)
        )
        if case is not LinkCase.LINKED:
            continue
        if node.interval_a.length <= tol and node.interval_b.length <= tol:
            lo = max(node.interval_a.lo, node.interval_b.lo)
            hi = min(node.interval_a.hi, node.interval_b.hi)
            enclosure = Interval(lo, hi) if lo < hi else Interval(lo, lo + tol * 1e-3)
            return IntersectionWitness(
                point=0.5 * (enclosure.lo + enclosure.hi),
                enclosure=enclosure,
                depth=max(depth_a, depth_b),
                word_a=node.word_a,
                word_b=node.word_b,
                nodes_visited=visited,
                linked_at=(depth_a + 1, depth_b + 1),
            )
        refine_a = node.interval_a.length >= node.interval_b.length
        word, kids = (node.word_a, kids_a) if refine_a else (node.word_b, kids_b)
        if len(word) > max_depth:
            budget_hit = True
            continue
        tau_here = _local_tau(kids)
        tau_a, tau_b = node.tau_a, node.tau_b
        if tau_here is not None:
            if refine_a:
                tau_a = tau_here
            else:
                tau_b = tau_here
            product = tau_a * tau_b
            if guard and product <= 1.0 + PRODUCT_MARGIN:
                if collapse is None or product < collapse[1]:
                    collapse = (len(word), product)
                continue
        expanded = []
        for child_word, interval in kids:
            if refine_a:
                if interval.meets(node.interval_b):
                    expanded.append(
                        _Node(child_word, interval, node.word_b, node.interval_b, tau_a, tau_b)
                    )
            elif interval.meets(node.interval_a):
                expanded.append(
                    _Node(node.word_a, node.interval_a, child_word, interval, tau_a, tau_b)
                )
        expanded.sort(key=lambda n: n.overlap)
        stack.extend(expanded)
    if budget_hit:
        raise DepthExceeded(max_depth)
    if collapse is not None:
        raise ThicknessCollapse(*collapse)
    raise IntersectionNotFound("every overlapping cylinder pair was pruned")
