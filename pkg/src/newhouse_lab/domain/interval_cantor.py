"""Dynamically defined Cantor sets: Markov systems, covers, gaps and thickness.

A `MarkovSystem` is a finite family of expanding branches over disjoint base
intervals. Its generation-g cover is the set of points whose first g iterates
stay in the base intervals; `refine` computes it as a sorted list of cylinder
intervals, each labelled with its symbol word.

Thickness follows the usual gap/bridge definition restricted to the gaps born by
the cover's generation. Lengths are compared after rounding to about nine
significant digits so that gaps which are equal in exact arithmetic tie, and
ties are broken in favour of the earlier-born gap.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from newhouse_lab.domain.errors import (
    DegenerateInterval,
    DegenerateScale,
    MarkovViolation,
    NoBoundedGap,
    NonExpanding,
    PreconditionError,
)
from newhouse_lab.domain.expressions import (
    AffineExpr,
    ComposeExpr,
    Expr,
    TentExpr,
)

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
Word = tuple[int, ...]

MARKOV_TOL = 1e-12
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise DegenerateInterval(f"degenerate interval [{self.lo!r}, {self.hi!r}]")

    @property
    def length(self) -> float:
        """The interval length."""
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        """The interval midpoint."""
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        """Return True if x lies within tol of the interval."""
        return self.lo - tol <= x <= self.hi + tol

    def contains_interval(self, other: Interval, tol: float = 0.0) -> bool:
        """Return True if `other` is inside this interval up to tol."""
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def meets(self, other: Interval) -> bool:
        """Return True if the two closed intervals intersect."""
        return self.lo <= other.hi and other.lo <= self.hi

    def to_list(self) -> list[float]:
        """Serialize as [lo, hi]."""
        return [self.lo, self.hi]

    @classmethod
    def from_list(cls, data: Sequence[float]) -> Interval:
        """Build an interval from [lo, hi]."""
        return cls(float(data[0]), float(data[1]))


@dataclass(frozen=True)
class Branch:
    """One expanding branch of a Markov system.

    Args:
        domain (Interval): The base interval the branch is defined on.
        map (Expr): A strictly monotone closed-form map on `domain`.
        covers (Optional[tuple[int, ...]]): Indices of the base intervals the
            image is declared to cover. Inferred from the image when omitted.
    """

    domain: Interval
    map: Expr
    covers: Optional[tuple[int, ...]] = None

    @property
    def bounds(self) -> tuple[float, float]:
        """The domain as a (lo, hi) tuple."""
        return (self.domain.lo, self.domain.hi)

    def image(self) -> Interval:
        """Return the image of the domain."""
        lo, hi = self.map.image(self.bounds)
        return Interval(lo, hi)

    def inverse(self, v: Any) -> Any:
        """Evaluate the inverse branch (image -> domain)."""
        return self.map.inverse(v, self.bounds)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the branch."""
        data: dict[str, Any] = {"domain": self.domain.to_list(), "map": self.map.to_dict()}
        if self.covers is not None:
            data["covers"] = list(self.covers)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Branch:
        """Deserialize a branch."""
        covers = data.get("covers")
        return cls(
            domain=Interval.from_list(data["domain"]),
            map=Expr.from_dict(data["map"]),
            covers=tuple(int(c) for c in covers) if covers is not None else None,
        )


@dataclass(frozen=True)
class MarkovSystem:
    """A finite expanding Markov system defining a Cantor set.

    Construction validates disjointness, expansivity (sampled), the Markov
    property and totality of the transition structure.
    """

    branches: tuple[Branch, ...]
    label: str = "system"
    expansivity_samples: int = 1024

    def __post_init__(self) -> None:
        if not self.branches:
            raise PreconditionError("a Markov system needs at least one branch")
        for left, right in zip(self.branches, self.branches[1:], strict=False):
            if not left.domain.hi < right.domain.lo:
                raise PreconditionError(
                    "branch domains must be pairwise disjoint and sorted by lo"
                )
        self._check_expansivity()
        _ = self.transitions

    def _check_expansivity(self) -> None:
        for index, branch in enumerate(self.branches):
            samples = np.linspace(
                branch.domain.lo, branch.domain.hi, self.expansivity_samples + 2
            )
            slopes = np.abs(np.asarray(branch.map.derivative(samples), dtype=float))
            worst = int(np.argmin(slopes))
            if not slopes[worst] > 1.0:
                raise NonExpanding(index, float(samples[worst]), float(slopes[worst]))

    @cached_property
    def transitions(self) -> tuple[tuple[int, ...], ...]:
        """For each branch, the base intervals its image covers."""
        domains = [b.domain for b in self.branches]
        result: list[tuple[int, ...]] = []
        for i, branch in enumerate(self.branches):
            image = branch.image()
            inside = tuple(
                j for j, d in enumerate(domains) if image.contains_interval(d, MARKOV_TOL)
            )
            if branch.covers is not None:
                for j in branch.covers:
                    if j not in inside:
                        raise MarkovViolation(
                            i, j, f"image of branch {i} does not cover domain {j}"
                        )
                result.append(tuple(sorted(branch.covers)))
                continue
            for j, d in enumerate(domains):
                overlap = min(image.hi, d.hi) - max(image.lo, d.lo)
                if j not in inside and overlap > MARKOV_TOL:
                    raise MarkovViolation(
                        i, j, f"image of branch {i} cuts through domain {j}"
                    )
            result.append(inside)
        for j in range(len(domains)):
            if not any(j in row for row in result):
                raise MarkovViolation(-1, j, f"domain {j} is not covered by any branch")
        return tuple(result)

    @property
    def domains(self) -> list[Interval]:
        """The base intervals."""
        return [b.domain for b in self.branches]

    def to_dict(self) -> dict[str, Any]:
        """Serialize to the JSON config form."""
        return {"label": self.label, "branches": [b.to_dict() for b in self.branches]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MarkovSystem:
        """Deserialize from the JSON config form."""
        return cls(
            branches=tuple(Branch.from_dict(b) for b in data["branches"]),
            label=str(data.get("label", "system")),
        )


@dataclass(frozen=True, eq=False)
class CantorApproximation:
    """The generation-g cover of a dynamically defined Cantor set.

    Intervals are stored as parallel arrays in output coordinates, i.e. after
    `transform` has been applied to the symbolic cylinders of `system`.
    `gap_births[k]` is the generation at which the gap between interval k and
    k + 1 appeared.
    """

    generation: int
    lo: FloatArray
    hi: FloatArray
    words: tuple[Word, ...]
    gap_births: IntArray
    system: Optional[MarkovSystem] = None
    transform: Optional[Expr] = None
    label: str = field(default="")

    def __len__(self) -> int:
        return int(self.lo.size)

    @property
    def intervals(self) -> list[Interval]:
        """The cover as a list of intervals."""
        return [Interval(float(a), float(b)) for a, b in zip(self.lo, self.hi, strict=True)]

    def with_arrays(
        self,
        lo: FloatArray,
        hi: FloatArray,
        words: tuple[Word, ...],
        gap_births: IntArray,
        transform: Optional[Expr],
    ) -> CantorApproximation:
        """Return a copy with new interval data."""
        return CantorApproximation(
            generation=self.generation,
            lo=lo,
            hi=hi,
            words=words,
            gap_births=gap_births,
            system=self.system,
            transform=transform,
            label=self.label,
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize the cover (intervals and gap births)."""
        return {
            "label": self.label,
            "generation": self.generation,
            "intervals": [[float(a), float(b)] for a, b in zip(self.lo, self.hi, strict=True)],
            "gap_births": [int(b) for b in self.gap_births],
        }


@dataclass(frozen=True)
class GapRecord:
    """A bounded gap with its two bridges."""

    gap: Interval
    left_bridge: Interval
    right_bridge: Interval
    birth: int


@dataclass(frozen=True)
class ThicknessReport:
    """The finite-generation thickness and the gap/bridge pair attaining it."""

    tau: float
    witness_gap: Interval
    witness_bridge: Interval
    generation: int

    def to_dict(self) -> dict[str, Any]:
        """Serialize the report."""
        return {
            "tau": self.tau,
            "witness_gap": self.witness_gap.to_list(),
            "witness_bridge": self.witness_bridge.to_list(),
            "generation": self.generation,
        }


@dataclass(frozen=True)
class ThicknessCrossCheck:
    """Measured tent-set thickness against the closed form 2^(m-1) - 3."""

    m: int
    generation: int
    expected: float
    measured: float
    relative_deviation: float
    within_tolerance: bool
    witness_gap: Interval
    witness_bridge: Interval

    def to_dict(self) -> dict[str, Any]:
        """Serialize the cross-check."""
        return {
            "m": self.m,
            "generation": self.generation,
            "expected": self.expected,
            "measured": self.measured,
            "relative_deviation": self.relative_deviation,
            "within_tolerance": self.within_tolerance,
            "witness_gap": self.witness_gap.to_list(),
            "witness_bridge": self.witness_bridge.to_list(),
        }


# --- Factories ---


def middle_thirds() -> MarkovSystem:
    """The middle-thirds system u -> 3u on [0,1/3], u -> 3u-2 on [2/3,1]."""
    return MarkovSystem(
        branches=(
            Branch(Interval(0.0, 1.0 / 3.0), AffineExpr(3.0, 0.0)),
            Branch(Interval(2.0 / 3.0, 1.0), AffineExpr(3.0, -2.0)),
        ),
        label="middle-thirds",
    )


def vertical_system(t: float) -> MarkovSystem:
    """The two-branch system k^t: 2y/t on [0,t/2] and 2(1-y)/t on [1-t/2,1]."""
    if not 0.0 < t < 1.0:
        raise PreconditionError(f"t must lie in (0, 1), got {t!r}")
    return MarkovSystem(
        branches=(
            Branch(Interval(0.0, t / 2.0), AffineExpr(2.0 / t, 0.0)),
            Branch(Interval(1.0 - t / 2.0, 1.0), AffineExpr(-2.0 / t, 2.0 / t)),
        ),
        label=f"k^t(t={t!r})",
    )


def affine_two_branch(a: float, b: float) -> MarkovSystem:
    """Increasing affine branches from [0,a] and [b,1] onto [0,1]."""
    if not 0.0 < a < b < 1.0:
        raise PreconditionError(f"need 0 < a < b < 1, got a={a!r}, b={b!r}")
    return MarkovSystem(
        branches=(
            Branch(Interval(0.0, a), AffineExpr(1.0 / a, 0.0)),
            Branch(Interval(b, 1.0), AffineExpr(1.0 / (1.0 - b), -b / (1.0 - b))),
        ),
        label=f"affine(a={a!r},b={b!r})",
    )


def tent_domain_fractions(m: int) -> list[tuple[Fraction, Fraction]]:
    """Exact base intervals [2^(i-1)d, 2^(i-m)(1-d)], i = 2..m, d = 1/(2^m-1)."""
    if m < 3:
        raise PreconditionError(f"tent system needs m >= 3, got {m}")
    delta = Fraction(1, 2**m - 1)
    return [
        (2 ** (i - 1) * delta, Fraction(2) ** (i - m) * (1 - delta))
        for i in range(2, m + 1)
    ]


def tent_system(m: int) -> MarkovSystem:
    """The tent-map system whose invariant set is K_m."""
    branches = tuple(
        Branch(Interval(float(lo), float(hi)), TentExpr())
        for lo, hi in tent_domain_fractions(m)
    )
    return MarkovSystem(branches=branches, label=f"tent(m={m})")


# --- Core operations ---


def refine(system: MarkovSystem, g: int) -> CantorApproximation:
    """Return the generation-g cover of the system's Cantor set.

    Args:
        system (MarkovSystem): The expanding Markov system.
        g (int): The generation, g >= 0.

    Returns:
        CantorApproximation: Sorted cylinders with words and gap births.

    Raises:
        PreconditionError: If g is negative.
    """
    if g < 0:
        raise PreconditionError(f"generation must be >= 0, got {g}")
    return _refine_cached(system, g)


@lru_cache(maxsize=64)
def _refine_cached(system: MarkovSystem, g: int) -> CantorApproximation:
    if g > 0:
        previous = _refine_cached(system, g - 1)
        return _next_generation(previous)
    order = sorted(range(len(system.branches)), key=lambda i: system.branches[i].domain.lo)
    lo = np.array([system.branches[i].domain.lo for i in order])
    hi = np.array([system.branches[i].domain.hi for i in order])
    return CantorApproximation(
        generation=0,
        lo=lo,
        hi=hi,
        words=tuple((i,) for i in order),
        gap_births=np.zeros(max(len(order) - 1, 0), dtype=np.int64),
        system=system,
        label=system.label,
    )


def _next_generation(previous: CantorApproximation) -> CantorApproximation:
    system = previous.system
    assert system is not None
    first = np.array([w[0] for w in previous.words], dtype=np.int64)
    lo_parts: list[FloatArray] = []
    hi_parts: list[FloatArray] = []
    words: list[Word] = []
    for i, branch in enumerate(system.branches):
        mask = np.isin(first, system.transitions[i])
        if not mask.any():
            continue
        a = np.asarray(branch.inverse(previous.lo[mask]), dtype=float)
        b = np.asarray(branch.inverse(previous.hi[mask]), dtype=float)
        lo_parts.append(np.minimum(a, b))
        hi_parts.append(np.maximum(a, b))
        words.extend((i, *previous.words[n]) for n in np.flatnonzero(mask))
    lo = np.concatenate(lo_parts)
    hi = np.concatenate(hi_parts)
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    sorted_words = tuple(words[n] for n in order)
    births = _inherit_births(previous, lo, hi, previous.generation + 1)
    return CantorApproximation(
        generation=previous.generation + 1,
        lo=lo,
        hi=hi,
        words=sorted_words,
        gap_births=births,
        system=system,
        label=previous.label,
    )


def _inherit_births(
    previous: CantorApproximation, lo: FloatArray, hi: FloatArray, generation: int
) -> IntArray:
    births = np.full(max(lo.size - 1, 0), generation, dtype=np.int64)
    if previous.lo.size < 2 or births.size == 0:
        return births
    old_mid = 0.5 * (previous.hi[:-1] + previous.lo[1:])
    slot = np.searchsorted(lo, old_mid, side="right") - 1
    valid = (slot >= 0) & (slot < births.size)
    np.minimum.at(births, slot[valid], previous.gap_births[valid])
    return births


def children(approx: CantorApproximation, word: Word) -> list[tuple[Word, Interval]]:
    """Return the next-generation cylinders inside the cylinder `word`.

    Children are computed from the symbolic system and mapped through the
    approximation's transform, so they can be produced below the stored
    generation.
    """
    system = approx.system
    if system is None:
        raise PreconditionError("children need the approximation's Markov system")
    out: list[tuple[Word, Interval]] = []
    for j in system.transitions[word[-1]]:
        a, b = system.branches[j].bounds
        for symbol in reversed(word):
            branch = system.branches[symbol]
            a = float(branch.inverse(a))
            b = float(branch.inverse(b))
        if approx.transform is not None:
            a = float(approx.transform(a))
            b = float(approx.transform(b))
        out.append(((*word, j), Interval(min(a, b), max(a, b))))
    out.sort(key=lambda item: item[1].lo)
    return out


def _quantize(lengths: FloatArray) -> IntArray:
    with np.errstate(divide="ignore"):
        return np.rint(np.log(lengths) * 1e9).astype(np.int64)


def _blocks(q: IntArray, births: IntArray, j: int, k: int) -> bool:
    """Whether gap j stops a bridge reaching out from gap k.

    A gap blocks when it is strictly longer, or when it has the same quantized
    length and was born no later. An equal gap born later is part of the
    bridge.
    """
    return bool(q[j] > q[k] or (q[j] == q[k] and births[j] <= births[k]))


def _bridge_limits(q: IntArray, births: IntArray) -> tuple[IntArray, IntArray]:
    n = q.size
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, n, dtype=np.int64)
    stack: list[int] = []
    for k in range(n):
        while stack and not _blocks(q, births, stack[-1], k):
            stack.pop()
        left[k] = stack[-1] if stack else -1
        stack.append(k)
    stack = []
    for k in range(n - 1, -1, -1):
        while stack and not _blocks(q, births, stack[-1], k):
            stack.pop()
        right[k] = stack[-1] if stack else n
        stack.append(k)
    return left, right


def _gap_structure(
    lo: FloatArray, hi: FloatArray, births: IntArray
) -> tuple[FloatArray, FloatArray, IntArray, IntArray]:
    gap_lo = hi[:-1]
    gap_hi = lo[1:]
    left, right = _bridge_limits(_quantize(gap_hi - gap_lo), births)
    return gap_lo, gap_hi, left, right


def gaps_and_bridges(approx: CantorApproximation) -> list[GapRecord]:
    """Return every bounded gap of the cover with its left and right bridge.

    A bridge of gap k runs from the gap to the nearest gap that is at least as
    long. Lengths are compared after rounding log-lengths to 1e-9, and among
    equal lengths only a gap born at or before k ends the bridge, so for gaps
    of the same length the earlier one sees the later one as bridge interior.
    """
    lo, hi = approx.lo, approx.hi
    if lo.size < 2:
        return []
    gap_lo, gap_hi, left, right = _gap_structure(lo, hi, approx.gap_births)
    records = []
    last = lo.size - 1
    for k in range(gap_lo.size):
        start = lo[left[k] + 1] if left[k] >= 0 else lo[0]
        end = hi[right[k]] if right[k] < gap_lo.size else hi[last]
        records.append(
            GapRecord(
                gap=Interval(float(gap_lo[k]), float(gap_hi[k])),
                left_bridge=Interval(float(start), float(gap_lo[k])),
                right_bridge=Interval(float(gap_hi[k]), float(end)),
                birth=int(approx.gap_births[k]),
            )
        )
    return records


def thickness_of_arrays(
    lo: FloatArray, hi: FloatArray, births: IntArray, generation: int
) -> ThicknessReport:
    """Compute the thickness report of a sorted cover given as arrays.

    Raises:
        NoBoundedGap: If the cover has fewer than two intervals.
    """
    if lo.size < 2:
        raise NoBoundedGap("a single-interval cover has no bounded gap")
    gap_lo, gap_hi, left, right = _gap_structure(lo, hi, births)
    gap_len = gap_hi - gap_lo
    n_gaps = gap_lo.size
    left_start = np.where(left >= 0, lo[np.clip(left + 1, 0, lo.size - 1)], lo[0])
    right_end = np.where(right < n_gaps, hi[np.clip(right, 0, hi.size - 1)], hi[-1])
    left_ratio = (gap_lo - left_start) / gap_len
    right_ratio = (right_end - gap_hi) / gap_len
    tau = float(min(left_ratio.min(), right_ratio.min()))
    threshold = tau * (1.0 + TIE_RTOL)
    candidates: list[tuple[int, int, int]] = []
    for side, ratios in ((0, left_ratio), (1, right_ratio)):
        for k in np.flatnonzero(ratios <= threshold):
            candidates.append((int(births[k]), int(k), side))
    _, k, side = min(candidates)
    gap = Interval(float(gap_lo[k]), float(gap_hi[k]))
    if side == 0:
        bridge = Interval(float(left_start[k]), float(gap_lo[k]))
    else:
        bridge = Interval(float(gap_hi[k]), float(right_end[k]))
    return ThicknessReport(tau=tau, witness_gap=gap, witness_bridge=bridge, generation=generation)


def thickness(approx: CantorApproximation) -> ThicknessReport:
    """Return the generation-g thickness of the cover.

    Raises:
        NoBoundedGap: If the cover is a single interval.
    """
    return thickness_of_arrays(approx.lo, approx.hi, approx.gap_births, approx.generation)


def hull(approx: CantorApproximation) -> Interval:
    """Return the convex hull of the cover."""
    return Interval(float(approx.lo[0]), float(approx.hi[-1]))


def distance(approx: CantorApproximation, x: Any) -> Any:
    """Return the distance from x (scalar or array) to the cover."""
    xs = np.asarray(x, dtype=float)
    i = np.clip(np.searchsorted(approx.lo, xs, side="right") - 1, 0, approx.lo.size - 1)
    d_here = np.maximum(0.0, np.maximum(approx.lo[i] - xs, xs - approx.hi[i]))
    j = np.clip(i + 1, 0, approx.lo.size - 1)
    d_next = np.maximum(0.0, np.maximum(approx.lo[j] - xs, xs - approx.hi[j]))
    result = np.minimum(d_here, d_next)
    return float(result) if result.ndim == 0 else result


def member(
    approx: CantorApproximation, x: float, tol: float, depth: Optional[int] = None
) -> bool:
    """Return True if x lies within tol of the cover.

    Args:
        approx (CantorApproximation): The cover.
        x (float): The query point.
        tol (float): Distance tolerance.
        depth (Optional[int]): When larger than the stored generation, the
            cylinders near x are refined lazily down to this generation.

    Returns:
        bool: Whether x is within tol of a cylinder of the requested depth.
    """
    if depth is None or depth <= approx.generation:
        return bool(distance(approx, x) <= tol)
    frontier: list[tuple[Word, Interval]] = [
        (w, Interval(float(a), float(b)))
        for w, a, b in zip(approx.words, approx.lo, approx.hi, strict=True)
        if a - tol <= x <= b + tol
    ]
    for _ in range(depth - approx.generation):
        frontier = [
            child
            for word, _interval in frontier
            for child in children(approx, word)
            if child[1].contains(x, tol)
        ]
        if not frontier:
            return False
    return True


def monotone_image(
    approx: CantorApproximation, expr: Expr, label: Optional[str] = None
) -> CantorApproximation:
    """Return the image of the cover under a strictly monotone map.

    Raises:
        PreconditionError: If the map is not monotone on the cover.
    """
    a = np.asarray(expr(approx.lo), dtype=float)
    b = np.asarray(expr(approx.hi), dtype=float)
    if float(b[-1]) < float(a[0]):
        a, b = b[::-1].copy(), a[::-1].copy()
        words = tuple(reversed(approx.words))
        births = approx.gap_births[::-1].copy()
    else:
        words = approx.words
        births = approx.gap_births.copy()
    if np.any(b <= a) or np.any(a[1:] <= b[:-1]):
        raise PreconditionError("map is not strictly monotone on the cover")
    transform = expr if approx.transform is None else ComposeExpr(expr, approx.transform)
    image = approx.with_arrays(a, b, words, births, transform)
    if label is not None:
        image = CantorApproximation(
            generation=image.generation,
            lo=image.lo,
            hi=image.hi,
            words=image.words,
            gap_births=image.gap_births,
            system=image.system,
            transform=image.transform,
            label=label,
        )
    return image


def affine_image(approx: CantorApproximation, alpha: float, beta: float) -> CantorApproximation:
    """Return the image of the cover under u -> alpha*u + beta.

    Raises:
        DegenerateScale: If alpha is zero.
    """
    if alpha == 0.0:
        raise DegenerateScale("affine image needs a nonzero scale")
    return monotone_image(approx, AffineExpr(alpha, beta))


def restrict(approx: CantorApproximation, first_symbols: Iterable[int]) -> CantorApproximation:
    """Keep only the cylinders whose word starts with one of `first_symbols`."""
    allowed = set(first_symbols)
    keep = np.array([w[0] in allowed for w in approx.words], dtype=bool)
    index = np.flatnonzero(keep)
    if index.size == 0:
        raise PreconditionError(f"no cylinder starts with a symbol in {sorted(allowed)}")
    births = np.array(
        [int(approx.gap_births[index[n] : index[n + 1]].min()) for n in range(index.size - 1)],
        dtype=np.int64,
    )
    return approx.with_arrays(
        approx.lo[index].copy(),
        approx.hi[index].copy(),
        tuple(approx.words[n] for n in index),
        births,
        approx.transform,
    )


def tent_cross_check(m: int, g: int, rel_tol: float = 0.2) -> ThicknessCrossCheck:
    """Compare the measured thickness of K_m with the closed form 2^(m-1) - 3."""
    report = thickness(refine(tent_system(m), g))
    expected = float(2 ** (m - 1) - 3)
    deviation = abs(report.tau - expected) / expected
    return ThicknessCrossCheck(
        m=m,
        generation=g,
        expected=expected,
        measured=report.tau,
        relative_deviation=deviation,
        within_tolerance=deviation <= rel_tol,
        witness_gap=report.witness_gap,
        witness_bridge=report.witness_bridge,
    )


def k_t_thickness(t: float) -> float:
    """Closed-form thickness t / (2(1 - t)) of the vertical system k^t."""
    return t / (2.0 * (1.0 - t))

