"""Skew products F(x, y) = (f(x, y), K_sgn(x)(y)) and the explicit family F^t.

The explicit family glues a flat-topped bump into 1 - 2x^2 on the critical
strip |x| < eps_m, with a bump height mu_m(y) chosen so that the second iterate
of the critical line {0+} x [0, t/2] is the straight segment
(-1 + rho_m y, t^2 y / 4). Comparing the stable and unstable Cantor sets along
that segment yields the non-hyperbolicity certificate.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq

from newhouse_lab.domain.errors import (
    ConfigError,
    HitCriticalLine,
    LinkingViolated,
    NewhouseLabError,
    NotExplicitFamily,
    NotInImage,
    PreconditionError,
    UndefinedAtCriticalLine,
    UnimodalityViolated,
)
from newhouse_lab.domain.expressions import AffineExpr, ComposeExpr, CosineExpr
from newhouse_lab.domain.gap_lemma import (
    GapLemmaDecision,
    GapLemmaOutcome,
    IntersectionWitness,
    gap_lemma_decide,
    intersect_refine,
)
from newhouse_lab.domain.interval_cantor import (
    Branch,
    CantorApproximation,
    Interval,
    MarkovSystem,
    distance,
    hull,
    member,
    monotone_image,
    refine,
    restrict,
    tent_domain_fractions,
    tent_system,
    vertical_system,
)

FloatArray = npt.NDArray[np.float64]


class Side(StrEnum):
    """Side tag of a point on (or off) the critical line x = 0."""

    PLUS = "+"
    MINUS = "-"
    NONE = "none"


class FamilyKind(StrEnum):
    """The kinds of skew maps."""

    EXPLICIT_BC = "explicit_bc"
    USER = "user"
    FLATTENED = "flattened"
    UNDONE = "undone"


class RhoMode(StrEnum):
    """How rho_m is derived from (t, m)."""

    SCALED = "scaled"
    THREE_HALVES = "three_halves"


@dataclass(frozen=True)
class SkewPoint:
    """A phase-space point; `side` disambiguates the map on x = 0."""

    x: float
    y: float
    side: Side = Side.NONE

    def sign(self) -> int:
        """Return the branch sign used by the vertical map.

        Raises:
            UndefinedAtCriticalLine: If x = 0 and no side tag is set.
        """
        if self.x > 0.0:
            return 1
        if self.x < 0.0:
            return -1
        if self.side is Side.PLUS:
            return 1
        if self.side is Side.MINUS:
            return -1
        raise UndefinedAtCriticalLine(f"map undefined at (0, {self.y!r}) without side")

    def to_dict(self) -> dict[str, Any]:
        """Serialize the point."""
        return {"x": self.x, "y": self.y, "side": str(self.side)}


# --- Parameters of the explicit family ---


def linking_sides(t: float, m: int, rho: float) -> tuple[float, float, float]:
    """Return (1-cos(pi d), t rho / 2, 1-cos(pi (1-d) / 2^(m-1))), d = 1/(2^m-1)."""
    delta = 1.0 / (2**m - 1)
    return (
        1.0 - math.cos(math.pi * delta),
        t * rho / 2.0,
        1.0 - math.cos(math.pi * (1.0 - delta) / 2 ** (m - 1)),
    )


@dataclass(frozen=True)
class BCParams:
    """Parameters and derived constants of the explicit family F^t."""

    t: float
    m: int
    c_rho: float
    rho_mode: RhoMode
    delta: float
    eps: float
    rho: float
    mu_max: float

    @classmethod
    def derive(
        cls, t: float, m: int, c_rho: float = 1.05, rho_mode: RhoMode = RhoMode.SCALED
    ) -> BCParams:
        """Validate (t, m, c_rho) and compute delta_m, eps_m, rho_m, mu_max.

        Raises:
            PreconditionError: If t, m or c_rho are out of range.
            LinkingViolated: If the strict linking inequality fails.
        """
        if not 0.0 < t < 1.0:
            raise PreconditionError(f"t must lie in (0, 1), got {t!r}")
        if m < 4:
            raise PreconditionError(f"m must be >= 4, got {m!r}")
        delta = 1.0 / (2**m - 1)
        if rho_mode is RhoMode.THREE_HALVES:
            rho = 2.0 * (1.0 - math.cos(3.0 * math.pi * delta / 2.0)) / t
        else:
            if not c_rho > 1.0:
                raise PreconditionError(f"c_rho must exceed 1, got {c_rho!r}")
            rho = 2.0 * c_rho * (1.0 - math.cos(math.pi * delta)) / t
        lower, middle, upper = linking_sides(t, m, rho)
        if not lower < middle < upper:
            raise LinkingViolated(lower, middle, upper)
        return cls(
            t=t,
            m=m,
            c_rho=c_rho,
            rho_mode=rho_mode,
            delta=delta,
            eps=math.sin(math.pi * delta / 2.0),
            rho=rho,
            mu_max=1.0 - math.sqrt(1.0 - rho * t / 4.0),
        )

    def to_dict(self) -> dict[str, Any]:
        """Serialize inputs and derived constants."""
        return {
            "t": self.t,
            "m": self.m,
            "c_rho": self.c_rho,
            "rho_mode": str(self.rho_mode),
            "delta_m": self.delta,
            "eps_m": self.eps,
            "rho_m": self.rho,
            "mu_max": self.mu_max,
        }


# --- Horizontal families ---


class XFamily(ABC):
    """A family x -> f(x, y) of unimodal maps with critical point 0."""

    kind: str = ""

    @abstractmethod
    def value(self, x: Any, y: Any) -> Any:
        """Evaluate f(x, y)."""

    @abstractmethod
    def dx(self, x: Any, y: Any) -> Any:
        """Evaluate the partial derivative in x."""

    @abstractmethod
    def dy(self, x: Any, y: Any) -> Any:
        """Evaluate the partial derivative in y."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Serialize the family."""

    def preimage(self, xp: float, y: float, sign: int) -> float:
        """Solve f(x, y) = xp for x on the side `sign` of the critical point.

        Raises:
            NotInImage: If xp is not attained on that side.
        """
        end = float(sign)
        f_top = float(self.value(0.0, y)) - xp
        f_end = float(self.value(end, y)) - xp
        if f_top == 0.0:
            return 0.0
        if f_top * f_end > 0.0:
            raise NotInImage(f"x'={xp!r} is not attained for y={y!r} on side {sign}")
        root = brentq(lambda s: float(self.value(s, y)) - xp, 0.0, end, xtol=1e-15)
        return float(root)

    def unimodality_violation(
        self, strip: float, x_samples: int = 400, y_samples: int = 65
    ) -> Optional[tuple[float, float]]:
        """Return the first (x, y) where f(., y) fails to be unimodal, if any."""
        inner = np.linspace(0.0, min(strip, 1.0), x_samples + 1)[1:]
        outer = np.linspace(min(strip, 1.0), 1.0, x_samples)
        xs = np.unique(np.concatenate([inner, outer]))
        for y in np.linspace(0.0, 1.0, y_samples):
            right = np.asarray(self.dx(xs, y), dtype=float)
            left = np.asarray(self.dx(-xs, y), dtype=float)
            bad = np.flatnonzero(right >= 0.0)
            if bad.size:
                return (float(xs[bad[0]]), float(y))
            bad = np.flatnonzero(left <= 0.0)
            if bad.size:
                return (float(-xs[bad[0]]), float(y))
        return None


@dataclass(frozen=True)
class ExplicitBCFamily(XFamily):
    """f(x, y) = 1 - 2x^2 - mu_m(y) (1 - x^2/eps^2)^3 on |x| < eps, else 1 - 2x^2."""

    params: BCParams
    kind = "explicit_bc"

    @property
    def _transition(self) -> tuple[float, float, float, float]:
        t, rho = self.params.t, self.params.rho
        base = 1.0 - rho * t / 4.0
        mu0 = 1.0 - math.sqrt(base)
        d1 = rho / (4.0 * math.sqrt(base))
        d2 = rho * rho / (16.0 * base**1.5)
        length = min((1.0 - t) / 2.0, t / 10.0)
        return mu0, d1, d2, length

    def mu(self, y: Any) -> Any:
        """The bump height mu_m(y), symmetric about y = 1/2."""
        t, rho = self.params.t, self.params.rho
        w = np.minimum(y, 1.0 - np.asarray(y))
        wing = 1.0 - np.sqrt(np.maximum(1.0 - rho * np.minimum(w, t / 2.0) / 2.0, 0.0))
        mu0, d1, d2, length = self._transition
        r = np.clip((w - t / 2.0) / length, 0.0, 1.0)
        k = (d2 / d1) * length + 2.0
        rise = d1 * length * (
            (r - r**2 + r**3 / 3.0) + k * (r**2 / 2.0 - 2.0 * r**3 / 3.0 + r**4 / 4.0)
        )
        return np.where(w <= t / 2.0, wing, mu0 + rise)

    def mu_y(self, y: Any) -> Any:
        """The derivative of mu_m in y."""
        t, rho = self.params.t, self.params.rho
        y_arr = np.asarray(y, dtype=float)
        direction = np.where(y_arr <= 0.5, 1.0, -1.0)
        w = np.minimum(y_arr, 1.0 - y_arr)
        wing = rho / (4.0 * np.sqrt(1.0 - rho * np.minimum(w, t / 2.0) / 2.0))
        _, d1, d2, length = self._transition
        r = np.clip((w - t / 2.0) / length, 0.0, 1.0)
        k = d2 / d1 + 2.0 / length
        middle = d1 * (1.0 - r) ** 2 * (1.0 + k * r * length)
        return direction * np.where(w <= t / 2.0, wing, middle)

    @property
    def mu_peak(self) -> float:
        """The largest bump height, reached on the middle of [0, 1]."""
        mu0, d1, d2, length = self._transition
        return mu0 + d1 * length / 2.0 + d2 * length**2 / 12.0

    def value(self, x: Any, y: Any) -> Any:
        eps = self.params.eps
        x_arr = np.asarray(x, dtype=float)
        u = x_arr * x_arr / (eps * eps)
        bump = np.where(u < 1.0, self.mu(y) * np.clip(1.0 - u, 0.0, None) ** 3, 0.0)
        return 1.0 - 2.0 * x_arr * x_arr - bump

    def dx(self, x: Any, y: Any) -> Any:
        eps = self.params.eps
        x_arr = np.asarray(x, dtype=float)
        u = x_arr * x_arr / (eps * eps)
        inside = x_arr * (-4.0 + 6.0 * self.mu(y) * np.clip(1.0 - u, 0.0, None) ** 2 / eps**2)
        return np.where(u < 1.0, inside, -4.0 * x_arr)

    def dxx(self, x: Any, y: Any) -> Any:
        """The second partial derivative in x."""
        eps = self.params.eps
        x_arr = np.asarray(x, dtype=float)
        u = x_arr * x_arr / (eps * eps)
        c = np.clip(1.0 - u, 0.0, None)
        inside = -4.0 + 6.0 * self.mu(y) / eps**2 * (c**2 - 4.0 * x_arr * x_arr * c / eps**2)
        return np.where(u < 1.0, inside, -4.0 + 0.0 * x_arr)

    def dy(self, x: Any, y: Any) -> Any:
        eps = self.params.eps
        x_arr = np.asarray(x, dtype=float)
        u = x_arr * x_arr / (eps * eps)
        return np.where(u < 1.0, -self.mu_y(y) * np.clip(1.0 - u, 0.0, None) ** 3, 0.0)

    def preimage(self, xp: float, y: float, sign: int) -> float:
        eps = self.params.eps
        r = (1.0 - xp) / 2.0
        if eps * eps <= r <= 1.0:
            return sign * math.sqrt(r)
        if r < eps * eps:
            return super().preimage(xp, y, sign)
        raise NotInImage(f"x'={xp!r} lies below f(+-1, y)")

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params.to_dict()}


@dataclass(frozen=True)
class QuadraticPeakFamily(XFamily):
    """f(x, y) = p0 + p1*y - a*x^2."""

    p0: float
    p1: float
    a: float
    kind = "quadratic_peak"

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise PreconditionError(f"quadratic_peak needs a > 0, got {self.a!r}")

    def value(self, x: Any, y: Any) -> Any:
        x_arr = np.asarray(x, dtype=float)
        return self.p0 + self.p1 * np.asarray(y, dtype=float) - self.a * x_arr * x_arr

    def dx(self, x: Any, y: Any) -> Any:
        return -2.0 * self.a * np.asarray(x, dtype=float) + 0.0 * np.asarray(y, dtype=float)

    def dy(self, x: Any, y: Any) -> Any:
        return self.p1 + 0.0 * np.asarray(x, dtype=float) * np.asarray(y, dtype=float)

    def preimage(self, xp: float, y: float, sign: int) -> float:
        r = (self.p0 + self.p1 * y - xp) / self.a
        if r < 0.0 or r > 1.0:
            raise NotInImage(f"x'={xp!r} is not attained for y={y!r}")
        return sign * math.sqrt(r)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "p0": self.p0, "p1": self.p1, "a": self.a}


@dataclass(frozen=True)
class FlattenedFamily(XFamily):
    """g(x, y) = f(sgn(x) eps, y) on |x| <= eps, f elsewhere."""

    base: XFamily
    eps: float
    kind = "flattened"

    def _clamp(self, x: Any) -> Any:
        x_arr = np.asarray(x, dtype=float)
        return np.where(np.abs(x_arr) <= self.eps, np.copysign(self.eps, x_arr), x_arr)

    def value(self, x: Any, y: Any) -> Any:
        return self.base.value(self._clamp(x), y)

    def dx(self, x: Any, y: Any) -> Any:
        x_arr = np.asarray(x, dtype=float)
        return np.where(np.abs(x_arr) <= self.eps, 0.0, self.base.dx(x_arr, y))

    def dy(self, x: Any, y: Any) -> Any:
        return self.base.dy(self._clamp(x), y)

    def preimage(self, xp: float, y: float, sign: int) -> float:
        x = self.base.preimage(xp, y, sign)
        if abs(x) <= self.eps:
            raise NotInImage(f"x'={xp!r} is a flat value of the strip")
        return x

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "eps": self.eps, "base": self.base.to_dict()}


@dataclass(frozen=True)
class UndoneFamily(XFamily):
    """A flattened family with a sharp cubic bump of half-width eps_undo at 0."""

    flat: FlattenedFamily
    eps_undo: float
    height: float
    kind = "undone"

    def _bump(self, x: Any) -> tuple[Any, Any]:
        x_arr = np.asarray(x, dtype=float)
        u = x_arr * x_arr / self.eps_undo**2
        c = np.clip(1.0 - u, 0.0, None)
        value = self.height * c**3
        slope = -6.0 * self.height * c**2 * x_arr / self.eps_undo**2
        return value, slope

    def value(self, x: Any, y: Any) -> Any:
        return self.flat.value(x, y) + self._bump(x)[0]

    def dx(self, x: Any, y: Any) -> Any:
        return self.flat.dx(x, y) + self._bump(x)[1]

    def dy(self, x: Any, y: Any) -> Any:
        return self.flat.dy(x, y)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "eps_undo": self.eps_undo,
            "height": self.height,
            "flat": self.flat.to_dict(),
        }


# --- Vertical dynamics ---


@dataclass(frozen=True)
class VerticalSystem:
    """The two-branch expanding map k whose inverse branches are K_+ and K_-."""

    system: MarkovSystem

    def __post_init__(self) -> None:
        if len(self.system.branches) != 2:
            raise PreconditionError("the vertical system needs exactly two branches")
        for branch in self.system.branches:
            image = branch.image()
            if not image.contains_interval(Interval(0.0, 1.0), 1e-12):
                raise PreconditionError("each vertical branch must map onto [0, 1]")

    @property
    def a(self) -> float:
        """Right end of the K_+ image."""
        return self.system.branches[0].domain.hi

    @property
    def b(self) -> float:
        """Left end of the K_- image."""
        return self.system.branches[1].domain.lo

    def k(self, y: Any, sign: Any) -> Any:
        """Evaluate K_sign(y) (sign > 0 gives K_+)."""
        left, right = self.system.branches
        return np.where(np.asarray(sign) > 0, left.inverse(y), right.inverse(y))

    def k_y(self, y: Any, sign: Any) -> Any:
        """Evaluate the derivative of K_sign at y."""
        left, right = self.system.branches
        d_left = 1.0 / np.asarray(left.map.derivative(left.inverse(y)), dtype=float)
        d_right = 1.0 / np.asarray(right.map.derivative(right.inverse(y)), dtype=float)
        return np.where(np.asarray(sign) > 0, d_left, d_right)

    def max_slope(self, samples: int = 1025) -> float:
        """Return the sampled sup of |K_y| over both branches."""
        ys = np.linspace(0.0, 1.0, samples)
        return float(max(np.max(np.abs(self.k_y(ys, 1))), np.max(np.abs(self.k_y(ys, -1)))))

    def preimage(self, yp: float) -> tuple[int, float]:
        """Return (sign, y) with K_sign(y) = yp.

        Raises:
            NotInImage: If yp lies in the middle gap (a, b).
        """
        left, right = self.system.branches
        if 0.0 <= yp <= self.a:
            return 1, float(left.map(yp))
        if self.b <= yp <= 1.0:
            return -1, float(right.map(yp))
        raise NotInImage(f"y'={yp!r} lies in the middle gap ({self.a!r}, {self.b!r})")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VerticalSystem:
        """Build from {a, b} or {branches: [...]}."""
        if "branches" in data:
            return cls(MarkovSystem.from_dict({"label": "vertical", **data}))
        a, b = float(data["a"]), float(data["b"])
        if not 0.0 < a < b < 1.0:
            raise ConfigError(f"vertical system needs 0 < a < b < 1, got {a!r}, {b!r}")
        return cls(
            MarkovSystem(
                branches=(
                    Branch(Interval(0.0, a), AffineExpr(1.0 / a, 0.0)),
                    Branch(Interval(b, 1.0), AffineExpr(-1.0 / (1.0 - b), 1.0 / (1.0 - b))),
                ),
                label="vertical",
            )
        )


# --- Skew maps ---


@dataclass(frozen=True)
class SkewMap:
    """F(x, y) = (f(x, y), K_sgn(x)(y))."""

    kind: FamilyKind
    x_family: XFamily
    vertical: VerticalSystem
    params: Optional[BCParams] = None
    strip: float = 0.0

    def require_explicit(self) -> BCParams:
        """Return the explicit-family parameters.

        Raises:
            NotExplicitFamily: If this is not an explicit F^t map.
        """
        if self.kind is not FamilyKind.EXPLICIT_BC or self.params is None:
            raise NotExplicitFamily(f"operation needs the explicit family, got {self.kind}")
        return self.params

    def eval(self, p: SkewPoint) -> SkewPoint:
        """Apply F to a point (side tag required on x = 0).

        Raises:
            UndefinedAtCriticalLine: If x = 0 and no side tag is given.
        """
        sign = p.sign()
        x = float(self.x_family.value(p.x, p.y))
        y = float(self.vertical.k(p.y, sign))
        return SkewPoint(x, y)

    def step_arrays(self, x: FloatArray, y: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Apply F to arrays of points; points with x = 0 become NaN."""
        sign = np.sign(x)
        x_next = np.asarray(self.x_family.value(x, y), dtype=float)
        y_next = np.asarray(self.vertical.k(y, sign), dtype=float)
        dead = sign == 0
        x_next = np.where(dead, np.nan, x_next)
        y_next = np.where(dead, np.nan, y_next)
        return x_next, y_next

    def derivative_entries(self, p: SkewPoint) -> tuple[float, float, float]:
        """Return (f_x, f_y, K_y) at p."""
        sign = p.sign()
        return (
            float(self.x_family.dx(p.x, p.y)),
            float(self.x_family.dy(p.x, p.y)),
            float(self.vertical.k_y(p.y, sign)),
        )

    def inverse(self, p: SkewPoint) -> SkewPoint:
        """Return the unique preimage of p.

        Raises:
            NotInImage: If p has no preimage.
        """
        sign, y = self.vertical.preimage(p.y)
        x = self.x_family.preimage(p.x, y, sign)
        side = Side.PLUS if sign > 0 else Side.MINUS
        return SkewPoint(x, y, side if x == 0.0 else Side.NONE)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the map."""
        return {
            "kind": str(self.kind),
            "x_family": self.x_family.to_dict(),
            "vertical": self.vertical.system.to_dict(),
            "strip": self.strip,
        }


def make_bc(
    t: float, m: int, c_rho: float = 1.05, rho_mode: RhoMode = RhoMode.SCALED
) -> SkewMap:
    """Build the explicit family F^t and validate its invariants.

    Raises:
        PreconditionError: If t or m are out of range.
        LinkingViolated: If the strict linking inequality fails.
        UnimodalityViolated: If the interpolated family is not unimodal.
    """
    params = BCParams.derive(t, m, c_rho, rho_mode)
    family = ExplicitBCFamily(params)
    violation = family.unimodality_violation(params.eps)
    if violation is not None:
        raise UnimodalityViolated(*violation)
    return SkewMap(
        kind=FamilyKind.EXPLICIT_BC,
        x_family=family,
        vertical=VerticalSystem(vertical_system(t)),
        params=params,
        strip=params.eps,
    )


def make_user(x_family: XFamily, vertical: VerticalSystem, strip: float = 0.0) -> SkewMap:
    """Build a user-configured skew map and validate unimodality.

    Raises:
        UnimodalityViolated: If the family is not unimodal.
    """
    violation = x_family.unimodality_violation(max(strip, 0.05))
    if violation is not None:
        raise UnimodalityViolated(*violation)
    return SkewMap(kind=FamilyKind.USER, x_family=x_family, vertical=vertical, strip=strip)


def skew_map_from_dict(data: dict[str, Any]) -> SkewMap:
    """Build a skew map from its family config.

    Raises:
        ConfigError: If the config is malformed.
    """
    kind = data.get("kind")
    try:
        if kind == FamilyKind.EXPLICIT_BC:
            return make_bc(
                float(data["t"]),
                int(data["m"]),
                float(data.get("c_rho", 1.05)),
                RhoMode(data.get("rho_mode", RhoMode.SCALED)),
            )
        if kind == FamilyKind.USER:
            xf = data["x_family"]
            if xf.get("kind") != QuadraticPeakFamily.kind:
                raise ConfigError(f"unknown x_family kind {xf.get('kind')!r}")
            family = QuadraticPeakFamily(float(xf["p0"]), float(xf["p1"]), float(xf["a"]))
            return make_user(
                family, VerticalSystem.from_dict(data["vertical"]), float(data.get("strip", 0.0))
            )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid family config: {e}") from e
    raise ConfigError(f"unknown family kind {kind!r}")


def orbit(F: SkewMap, p0: SkewPoint, n: int) -> list[SkewPoint]:
    """Return the points p0, F(p0), ..., F^n(p0).

    Raises:
        HitCriticalLine: If an iterate after p0 lands exactly on x = 0.
    """
    points = [p0]
    current = p0
    for step in range(n):
        if step > 0 and current.x == 0.0:
            raise HitCriticalLine(step)
        current = F.eval(current)
        points.append(current)
    return points


def eval2_on_critical(F: SkewMap, y: float, side: Side) -> SkewPoint:
    """Return F^2(0^side, y)."""
    return F.eval(F.eval(SkewPoint(0.0, y, side)))


@dataclass(frozen=True)
class LineOfTangencies:
    """The segment L+ = {(-1 + rho y, t^2 y / 4) : y in [0, t/2]}."""

    rho: float
    t: float

    def x(self, y: Any) -> Any:
        """The x-coordinate along the segment."""
        return -1.0 + self.rho * np.asarray(y, dtype=float)

    def second(self, y: Any) -> Any:
        """The y-coordinate along the segment."""
        return self.t * self.t * np.asarray(y, dtype=float) / 4.0

    @property
    def domain(self) -> Interval:
        """The parameter interval [0, t/2]."""
        return Interval(0.0, self.t / 2.0)

    @property
    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """The two ends of the segment."""
        end = self.t / 2.0
        return ((-1.0, 0.0), (float(self.x(end)), float(self.second(end))))

    def to_dict(self) -> dict[str, Any]:
        """Serialize the segment."""
        return {
            "slope": self.rho,
            "domain": self.domain.to_list(),
            "endpoints": [list(e) for e in self.endpoints],
        }


def line_of_tangencies(F: SkewMap) -> LineOfTangencies:
    """Extract the line of tangencies of the explicit family."""
    params = F.require_explicit()
    return LineOfTangencies(rho=params.rho, t=params.t)


_HALF_ANGLE = ComposeExpr(CosineExpr(), AffineExpr(0.5, 0.0))


def tent_image_cover(F: SkewMap, g: int) -> CantorApproximation:
    """Return the generation-g cover of K~_m = h(K_m)."""
    params = F.require_explicit()
    return monotone_image(refine(tent_system(params.m), g), CosineExpr(), label="K~_m")


def stable_projection(F: SkewMap, g: int) -> CantorApproximation:
    """Return the cover of the negative f_2-preimage of K~_m inside the first interval."""
    params = F.require_explicit()
    first = restrict(refine(tent_system(params.m), g), [0])
    return monotone_image(first, _HALF_ANGLE, label="K^s")


def unstable_projection(F: SkewMap, g: int) -> CantorApproximation:
    """Return the cover of {-1 + rho y : y in K_0 cap [0, t/2]}."""
    params = F.require_explicit()
    left = restrict(refine(F.vertical.system, g), [0])
    return monotone_image(left, AffineExpr(params.rho, -1.0), label="K^u")


def critical_points(F: SkewMap, g: int) -> list[SkewPoint]:
    """Return (0^+, y) and (0^-, y) for every endpoint y of the generation-g K_0 cover."""
    cover = refine(F.vertical.system, g)
    ys = np.unique(np.concatenate([cover.lo, cover.hi]))
    return [SkewPoint(0.0, float(y), side) for y in ys for side in (Side.PLUS, Side.MINUS)]


@dataclass(frozen=True)
class TangencyHit:
    """A critical point whose k-th iterate lands on a vertical stable leaf."""

    y: float
    side: Side
    k: int
    stable_x: float

    def to_dict(self) -> dict[str, Any]:
        """Serialize the hit."""
        return {"y": self.y, "side": str(self.side), "k": self.k, "stable_x": self.stable_x}


def heteroclinic_tangency_search(
    F: SkewMap, g: int, k_max: int, tol: float, extra_y: tuple[float, ...] = ()
) -> list[TangencyHit]:
    """Find critical points that reach a vertical stable leaf within k_max steps.

    Stable leaves are the vertical lines over the generation-g covers of
    K~_m and of its preimage K^s on the line of tangencies. Each critical
    point reports its first hit; iteration stops once an orbit enters the
    critical strip.
    """
    params = F.require_explicit()
    leaves = (tent_image_cover(F, g), stable_projection(F, g))
    points = critical_points(F, g) + [
        SkewPoint(0.0, y, side) for y in extra_y for side in (Side.PLUS, Side.MINUS)
    ]
    if not points or k_max < 1:
        return []
    ys = np.array([p.y for p in points])
    signs = np.array([1.0 if p.side is Side.PLUS else -1.0 for p in points])
    x = np.asarray(F.x_family.value(np.zeros_like(ys), ys), dtype=float)
    y = np.asarray(F.vertical.k(ys, signs), dtype=float)
    active = np.ones(ys.size, dtype=bool)
    hits: list[TangencyHit] = []
    for k in range(1, k_max + 1):
        near = np.zeros(ys.size, dtype=bool)
        for leaf in leaves:
            near |= np.asarray(distance(leaf, np.nan_to_num(x, nan=10.0))) <= tol
        for n in np.flatnonzero(active & near):
            hits.append(TangencyHit(float(ys[n]), points[n].side, k, float(x[n])))
        active &= ~near
        active &= np.abs(x) >= params.eps
        if k < k_max:
            x, y = F.step_arrays(x, y)
    hits.sort(key=lambda h: (h.k, h.y, str(h.side)))
    return hits


# --- Certificate pipeline ---


class CertificateStatus(StrEnum):
    """Final status of a certificate."""

    CERTIFIED = "Certified"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ValidationRecord:
    """Checks along the validation orbit of the witness critical point."""

    steps: int
    max_x_distance: float
    max_y_distance: float
    max_defect: float
    min_abs_x: float
    passed: bool

    @property
    def max_distance(self) -> float:
        """Largest distance to the product-set cover."""
        return max(self.max_x_distance, self.max_y_distance)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the record."""
        return {
            "steps": self.steps,
            "max_distance": self.max_distance,
            "max_x_distance": self.max_x_distance,
            "max_y_distance": self.max_y_distance,
            "max_defect": self.max_defect,
            "min_abs_x": self.min_abs_x,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class NonHyperbolicityCertificate:
    """The outcome of the certificate pipeline and the evidence behind it."""

    params: BCParams
    generation: int
    status: CertificateStatus
    reason: str = ""
    tau_s: float = float("nan")
    tau_u: float = float("nan")
    tau_product: float = float("nan")
    decision: Optional[GapLemmaDecision] = None
    witness: Optional[IntersectionWitness] = None
    witness_y: Optional[float] = None
    validation: Optional[ValidationRecord] = None
    stable_hull: Optional[Interval] = None
    unstable_hull: Optional[Interval] = None
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def link(self) -> Optional[str]:
        """The linking case, if the decision was reached."""
        return str(self.decision.link.case) if self.decision is not None else None

    @property
    def printed_unstable_hull(self) -> list[float]:
        """The unstable hull as printed in the construction's write-up."""
        return [0.0, -1.0 + self.params.t * self.params.rho / 2.0]

    def to_dict(self) -> dict[str, Any]:
        """Serialize the certificate."""
        return {
            "status": str(self.status),
            "reason": self.reason,
            "params": self.params.to_dict(),
            "generation": self.generation,
            "tau_s": self.tau_s,
            "tau_u": self.tau_u,
            "tau_product": self.tau_product,
            "link": self.link,
            "gap_lemma": self.decision.to_dict() if self.decision else None,
            "witness": self.witness.to_dict() if self.witness else None,
            "witness_y": self.witness_y,
            "validation": self.validation.to_dict() if self.validation else None,
            "hulls": {
                "stable": self.stable_hull.to_list() if self.stable_hull else None,
                "unstable": self.unstable_hull.to_list() if self.unstable_hull else None,
                "unstable_printed": self.printed_unstable_hull,
            },
            "tolerances": dict(self.tolerances),
        }


def _exact_cylinder_left(m: int, word: tuple[int, ...]) -> Fraction:
    domains = tent_domain_fractions(m)
    ends = list(domains[word[-1]])
    for symbol in reversed(word[:-1]):
        lo, hi = domains[symbol]
        if lo + hi <= 1:
            ends = [v / 2 for v in ends]
        else:
            ends = [1 - v / 2 for v in ends]
    return min(ends)


def _tent(u: Fraction) -> Fraction:
    return 2 * u if u <= Fraction(1, 2) else 2 - 2 * u


def validate_orbit(
    F: SkewMap, witness: IntersectionWitness, witness_y: float, g: int, tol: float, steps: int
) -> ValidationRecord:
    """Follow the witness critical point and check it shadows the product set.

    Steps 0-2 are iterated by F. From step 3 on, the x-part is h(T_2^(n-3)(u*))
    with u* the exact left end of the witness cylinder in tent coordinates; the
    y-part is iterated by F and the one-step defect of F is recorded.
    """
    params = F.require_explicit()
    k0 = refine(F.vertical.system, g)
    stable = stable_projection(F, g)
    tilde = tent_image_cover(F, g)
    u = _exact_cylinder_left(params.m, witness.word_a)
    xs = [0.0]
    ys = [witness_y]
    if steps >= 1:
        p1 = F.eval(SkewPoint(0.0, witness_y, Side.PLUS))
        xs.append(p1.x)
        ys.append(p1.y)
    if steps >= 2:
        p2 = F.eval(SkewPoint(xs[1], ys[1]))
        xs.append(p2.x)
        ys.append(p2.y)
    for n in range(3, steps + 1):
        xs.append(float(-math.cos(math.pi * float(u))))
        ys.append(float(F.vertical.k(ys[-1], 1 if xs[-2] > 0 else -1)))
        u = _tent(u)
    x_arr = np.array(xs)
    y_arr = np.array(ys)
    y_dist = float(np.max(distance(k0, y_arr)))
    x_dist = 0.0
    if steps >= 2:
        x_dist = float(distance(stable, x_arr[2]))
    if steps >= 3:
        x_dist = max(x_dist, float(np.max(distance(tilde, x_arr[3:]))))
    defect = 0.0
    if steps >= 3:
        predicted = np.asarray(F.x_family.value(x_arr[2:-1], y_arr[2:-1]), dtype=float)
        defect = float(np.max(np.abs(predicted - x_arr[3:])))
    min_abs_x = float(np.min(np.abs(x_arr[1:]))) if steps >= 1 else float("inf")
    passed = (
        x_dist <= tol
        and y_dist <= tol
        and defect <= tol
        and min_abs_x >= params.eps - tol
    )
    return ValidationRecord(steps, x_dist, y_dist, defect, min_abs_x, passed)


def certify_nonhyperbolic(
    t: float,
    m: int,
    c_rho: float = 1.05,
    g: int = 12,
    tol: float = 1e-6,
    N: int = 1000,
    *,
    rho_mode: RhoMode = RhoMode.SCALED,
    witness_tol: float = 1e-10,
    max_depth: int = 80,
) -> NonHyperbolicityCertificate:
    """Run the thickness, linking, witness and validation pipeline.

    Construction errors of the map propagate; every later failure becomes an
    Inconclusive certificate carrying the reason.

    Raises:
        PreconditionError: If (t, m, c_rho) are out of range.
        LinkingViolated: If the strict linking inequality fails.
        UnimodalityViolated: If the interpolated family is not unimodal.
    """
    F = make_bc(t, m, c_rho, rho_mode)
    params = F.require_explicit()
    tolerances = {"tol": tol, "witness_tol": witness_tol}
    base: dict[str, Any] = {"params": params, "generation": g, "tolerances": tolerances}
    try:
        stable = stable_projection(F, g)
        unstable = unstable_projection(F, g)
        decision = gap_lemma_decide(stable, unstable)
        base.update(
            tau_s=decision.tau_a,
            tau_u=decision.tau_b,
            tau_product=decision.tau_product,
            decision=decision,
            stable_hull=hull(stable),
            unstable_hull=hull(unstable),
        )
        if decision.outcome is not GapLemmaOutcome.INTERSECT:
            return NonHyperbolicityCertificate(
                status=CertificateStatus.INCONCLUSIVE,
                reason=f"GapLemma: {decision.outcome} (tau_product={decision.tau_product!r})",
                **base,
            )
        witness = intersect_refine(stable, unstable, witness_tol, max_depth)
        witness_y = (witness.point + 1.0) / params.rho
        base.update(witness=witness, witness_y=witness_y)
        if not member(refine(F.vertical.system, g), witness_y, tol):
            return NonHyperbolicityCertificate(
                status=CertificateStatus.INCONCLUSIVE, reason="WitnessOffCantor", **base
            )
        validation = validate_orbit(F, witness, witness_y, g, tol, N)
        base.update(validation=validation)
    except NewhouseLabError as e:
        return NonHyperbolicityCertificate(
            status=CertificateStatus.INCONCLUSIVE, reason=f"{type(e).__name__}: {e}", **base
        )
    if not validation.passed:
        return NonHyperbolicityCertificate(
            status=CertificateStatus.INCONCLUSIVE, reason="ValidationFailed", **base
        )
    return NonHyperbolicityCertificate(status=CertificateStatus.CERTIFIED, **base)
