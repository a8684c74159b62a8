"""Hyperbolicity diagnostics away from the critical strip.

The derivative of a skew map is upper triangular, so DF^n along an orbit is
captured by three numbers (A_n, B_n, D_n). Everything here is built on that
cocycle: Pliss times, cone-field invariance, expansion checks, and the census
of attracting periodic orbits that the cone argument has to exclude.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from newhouse_lab.domain.bc_family import Side, SkewMap, SkewPoint
from newhouse_lab.domain.errors import (
    ConeConfigError,
    HitCriticalLine,
    NewhouseLabError,
    PreconditionError,
)
from newhouse_lab.domain.ids import SinkId, sink_id_for

FloatArray = npt.NDArray[np.float64]

SINK_DEDUP_TOL = 1e-8
POLISH_DAMPING = 0.5
REFILL_BATCH = 65_536
REFILL_DRAWS_PER_SAMPLE = 2_000


@dataclass(frozen=True)
class CocycleState:
    """The entries of DF^n = [[A, B], [0, D]] after n steps."""

    A: float = 1.0
    B: float = 0.0
    D: float = 1.0
    n: int = 0

    def step(self, fx: float, fy: float, ky: float) -> CocycleState:
        """Multiply on the left by one derivative matrix."""
        return CocycleState(
            fx * self.A, fx * self.B + fy * self.D, ky * self.D, self.n + 1
        )

    def then(self, later: CocycleState) -> CocycleState:
        """Return the state of `later` applied after `self`."""
        return CocycleState(
            later.A * self.A,
            later.A * self.B + later.B * self.D,
            later.D * self.D,
            self.n + later.n,
        )

    @property
    def det(self) -> float:
        """The determinant A*D."""
        return self.A * self.D

    def to_dict(self) -> dict[str, Any]:
        """Serialize the state."""
        return {"A": self.A, "B": self.B, "D": self.D, "n": self.n}


@dataclass(frozen=True)
class TraceRow:
    """One row of an orbit trace."""

    n: int
    point: SkewPoint
    state: CocycleState


def cocycle_trace(F: SkewMap, p0: SkewPoint, n: int) -> list[TraceRow]:
    """Return the orbit of p0 with the cocycle state at every step.

    Raises:
        HitCriticalLine: If an iterate after p0 lands on x = 0.
        UndefinedAtCriticalLine: If p0 is on x = 0 without a side tag.
    """
    rows = [TraceRow(0, p0, CocycleState())]
    point, state = p0, CocycleState()
    for step in range(n):
        if step > 0 and point.x == 0.0:
            raise HitCriticalLine(step)
        state = state.step(*F.derivative_entries(point))
        point = F.eval(point)
        rows.append(TraceRow(step + 1, point, state))
    return rows


def cocycle_accumulate(F: SkewMap, p0: SkewPoint, n: int) -> CocycleState:
    """Return (A_n, B_n, D_n) along the orbit of p0.

    Raises:
        HitCriticalLine: If an iterate after p0 lands on x = 0.
    """
    return cocycle_trace(F, p0, n)[-1].state


@dataclass(frozen=True)
class Trajectories:
    """Vectorized orbits and cocycles; row k holds step k for every start."""

    x: FloatArray
    y: FloatArray
    A: FloatArray
    B: FloatArray
    D: FloatArray


def cocycle_trajectories(F: SkewMap, x0: FloatArray, y0: FloatArray, n: int) -> Trajectories:
    """Iterate many starts at once; orbits through x = 0 turn into NaN."""
    size = np.asarray(x0).size
    shape = (n + 1, size)
    xs, ys = np.empty(shape), np.empty(shape)
    a_s, b_s, d_s = np.ones(shape), np.zeros(shape), np.ones(shape)
    x = np.asarray(x0, dtype=float).ravel().copy()
    y = np.asarray(y0, dtype=float).ravel().copy()
    xs[0], ys[0] = x, y
    with np.errstate(invalid="ignore"):
        for k in range(n):
            fx = np.asarray(F.x_family.dx(x, y), dtype=float)
            fy = np.asarray(F.x_family.dy(x, y), dtype=float)
            ky = np.asarray(F.vertical.k_y(y, np.sign(x)), dtype=float)
            a_s[k + 1] = fx * a_s[k]
            b_s[k + 1] = fx * b_s[k] + fy * d_s[k]
            d_s[k + 1] = ky * d_s[k]
            x, y = F.step_arrays(x, y)
            xs[k + 1], ys[k + 1] = x, y
    return Trajectories(xs, ys, a_s, b_s, d_s)


# --- Pliss times ---


@dataclass(frozen=True)
class PlissReport:
    """Pliss times of a sequence and whether the lemma's hypothesis held."""

    times: list[int]
    hypothesis_met: bool

    def to_dict(self) -> dict[str, Any]:
        """Serialize the report."""
        return {"times": list(self.times), "hypothesis_met": self.hypothesis_met}


def pliss_times(
    a: Sequence[float], gamma0: float, gamma1: float, a_bound: Optional[float] = None
) -> PlissReport:
    """Return every j with prod_{i=j..k} a_i < gamma1^(k-j) for all k >= j.

    The scan runs in linear time by comparing S(j) - j*log(gamma1) with a
    suffix maximum of S(k+1) - k*log(gamma1), where S is the log prefix sum.

    Raises:
        PreconditionError: If 0 < gamma0 < gamma1 < 1 fails or a value is not
            positive or leaves (1/a_bound, a_bound).
    """
    if not 0.0 < gamma0 < gamma1 < 1.0:
        raise PreconditionError(f"need 0 < gamma0 < gamma1 < 1, got {gamma0!r}, {gamma1!r}")
    values = np.asarray(a, dtype=float)
    if values.size == 0:
        return PlissReport([], False)
    if np.any(values <= 0.0):
        raise PreconditionError("Pliss sequences must be positive")
    if a_bound is not None and np.any((values <= 1.0 / a_bound) | (values >= a_bound)):
        raise PreconditionError(f"sequence leaves ({1.0 / a_bound!r}, {a_bound!r})")
    n = values.size
    log_g1 = math.log(gamma1)
    prefix = np.concatenate([[0.0], np.cumsum(np.log(values))])
    index = np.arange(n)
    ends = prefix[1:] - index * log_g1
    suffix_max = np.maximum.accumulate(ends[::-1])[::-1]
    starts = prefix[:-1] - index * log_g1
    times = [int(j) for j in np.flatnonzero(suffix_max < starts)]
    hypothesis = bool(prefix[-1] < n * math.log(gamma0))
    return PlissReport(times, hypothesis)


# --- Lambda_eps samples ---


@dataclass(frozen=True)
class LambdaEpsSample:
    """Points that persist in U_eps for the given budgets.

    Grid points come first, followed by the seeded random starts drawn to
    reach `requested` samples.
    """

    eps: float
    x: FloatArray
    y: FloatArray
    grid_density: int
    n_forward: int
    n_backward: int
    requested: int = 0
    random_draws: int = 0

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def shortfall(self) -> int:
        """How many requested samples could not be found."""
        return max(0, self.requested - len(self))

    def points(self) -> list[SkewPoint]:
        """The samples as points."""
        return [SkewPoint(float(a), float(b)) for a, b in zip(self.x, self.y, strict=True)]

    def subsample(self, count: int, seed: int) -> LambdaEpsSample:
        """Return at most `count` samples drawn without replacement."""
        if len(self) <= count:
            return self
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(self), size=count, replace=False))
        return replace(self, x=self.x[pick], y=self.y[pick])

    def to_dict(self) -> dict[str, Any]:
        """Summarize how the sample was obtained."""
        return {
            "requested": self.requested,
            "found": len(self),
            "shortfall": self.shortfall,
            "grid_density": self.grid_density,
            "random_draws": self.random_draws,
        }


def _persistent(
    F: SkewMap, x: FloatArray, y: FloatArray, eps: float, n_forward: int, n_backward: int
) -> tuple[FloatArray, FloatArray]:
    keep = np.abs(x) >= eps
    cx, cy = x[keep], y[keep]
    alive = np.ones(cx.size, dtype=bool)
    with np.errstate(invalid="ignore"):
        for _ in range(n_forward):
            cx, cy = F.step_arrays(cx, cy)
            alive &= np.abs(cx) >= eps
    index = np.flatnonzero(keep)[alive]
    survivors = [int(i) for i in index if _persists_backward(F, x[i], y[i], eps, n_backward)]
    chosen = np.array(survivors, dtype=np.int64)
    return x[chosen], y[chosen]


def _forward_images(
    F: SkewMap, x: FloatArray, y: FloatArray, eps: float, n_forward: int, n_backward: int
) -> tuple[FloatArray, FloatArray]:
    alive = np.abs(x) >= eps
    cx, cy = x, y
    mid_x, mid_y = x, y
    with np.errstate(invalid="ignore"):
        for step in range(n_backward + n_forward):
            cx, cy = F.step_arrays(cx, cy)
            alive &= np.abs(cx) >= eps
            if step + 1 == n_backward:
                mid_x, mid_y = cx, cy
    return mid_x[alive], mid_y[alive]


def sample_lambda_eps(
    F: SkewMap,
    eps: float,
    grid_density: int,
    n_forward: int,
    n_backward: int,
    seeds: Sequence[tuple[float, float]] = (),
    target: int = 0,
    seed: int = 0,
    max_draws: Optional[int] = None,
) -> LambdaEpsSample:
    """Return points whose orbit stays in U_eps both ways.

    The grid (plus `seeds`) is tried first. While fewer than `target` points
    survive, uniform random starts in U_eps are drawn in batches from a
    generator seeded with `seed`, up to `max_draws` in total (by default
    `REFILL_DRAWS_PER_SAMPLE` per requested sample). A start contributes its
    image after `n_backward` steps when its orbit stays in U_eps for
    `n_backward + n_forward` steps; the start and its first iterates are that
    image's backward orbit. A remaining gap is reported as `shortfall`.

    Raises:
        PreconditionError: If eps is not positive.
    """
    if not eps > 0.0:
        raise PreconditionError(f"eps must be positive, got {eps!r}")
    axis_x = np.linspace(-1.0, 1.0, grid_density)
    axis_y = np.linspace(0.0, 1.0, grid_density)
    gx, gy = np.meshgrid(axis_x, axis_y)
    x = np.concatenate([gx.ravel(), np.array([s[0] for s in seeds], dtype=float)])
    y = np.concatenate([gy.ravel(), np.array([s[1] for s in seeds], dtype=float)])
    found_x, found_y = _persistent(F, x, y, eps, n_forward, n_backward)
    xs, ys = [found_x], [found_y]
    count = found_x.size

    budget = REFILL_DRAWS_PER_SAMPLE * target if max_draws is None else max_draws
    drawn = 0
    rng = np.random.default_rng(seed)
    while count < target and drawn < budget and eps < 1.0:
        size = min(REFILL_BATCH, budget - drawn)
        rx = rng.uniform(eps, 1.0, size) * rng.choice(np.array([-1.0, 1.0]), size)
        ry = rng.uniform(0.0, 1.0, size)
        drawn += size
        found_x, found_y = _forward_images(F, rx, ry, eps, n_forward, n_backward)
        xs.append(found_x)
        ys.append(found_y)
        count += found_x.size
    return LambdaEpsSample(
        eps,
        np.concatenate(xs),
        np.concatenate(ys),
        grid_density,
        n_forward,
        n_backward,
        requested=target,
        random_draws=drawn,
    )


def _persists_backward(F: SkewMap, x: float, y: float, eps: float, steps: int) -> bool:
    point = SkewPoint(float(x), float(y))
    for _ in range(steps):
        try:
            point = F.inverse(point)
        except NewhouseLabError:
            return False
        if abs(point.x) < eps:
            return False
    return True


# --- Cone field ---


@dataclass(frozen=True)
class ConeConfig:
    """Constants of the cone-field argument."""

    lambda0: float
    lambda1: float
    lambda2: float
    gamma0: float
    b_bound: float
    R0: float
    n0: int
    eps: float

    def __post_init__(self) -> None:
        if not 0.0 < self.lambda0 < self.lambda1 < 1.0:
            raise ConeConfigError(
                f"need 0 < lambda0 < lambda1 < 1, got {self.lambda0!r}, {self.lambda1!r}"
            )
        if not math.sqrt(self.lambda1) < self.lambda2 < 1.0:
            raise ConeConfigError(f"need sqrt(lambda1) < lambda2 < 1, got {self.lambda2!r}")
        if self.gamma0 < 0.0 or self.n0 < 1:
            raise ConeConfigError("gamma0 must be >= 0 and n0 >= 1")
        if not self.width_margin > 0.5:
            raise ConeConfigError(
                f"cone width condition fails: 1 - gamma0*b*(R0*n0+1)/(lambda1-lambda0) "
                f"= {self.width_margin!r} <= 1/2"
            )

    @property
    def width_margin(self) -> float:
        """The left side of the cone width condition."""
        spread = self.gamma0 * self.b_bound * (self.R0 * self.n0 + 1.0)
        return 1.0 - spread / (self.lambda1 - self.lambda0)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the constants."""
        return {
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "gamma0": self.gamma0,
            "b_bound": self.b_bound,
            "R0": self.R0,
            "n0": self.n0,
            "eps": self.eps,
        }


def _u_eps_grid(eps: float, density: int) -> tuple[FloatArray, FloatArray]:
    xs = np.linspace(eps, 1.0, density)
    xs = np.concatenate([-xs[::-1], xs])
    gx, gy = np.meshgrid(xs, np.linspace(0.0, 1.0, density))
    return gx.ravel(), gy.ravel()


def derive_cone_config(
    F: SkewMap,
    eps: float,
    lambda1: float = 0.9,
    lambda2: float = 0.96,
    gamma0: float = 0.1,
    lambda_margin: float = 1e-9,
    b_margin: float = 1e-3,
    density: int = 257,
) -> ConeConfig:
    """Derive lambda0, n0, R0 and b from the map on U_eps.

    lambda0 is the sup of |K_y| plus a margin, n0 the least n with
    (lambda0/lambda1)^n < 1/4, R0 = (min |f_x| on U_eps)^(-n0) and b the
    sampled sup of |f_y| plus `b_margin`.

    Raises:
        ConeConfigError: If the derived constants violate the cone conditions.
    """
    if not 0.0 < eps <= 1.0:
        raise ConeConfigError(f"eps must lie in (0, 1], got {eps!r}")
    lambda0 = F.vertical.max_slope() + lambda_margin
    if not lambda0 < lambda1:
        raise ConeConfigError(f"lambda0={lambda0!r} is not below lambda1={lambda1!r}")
    n0 = 1
    while (lambda0 / lambda1) ** n0 >= 0.25:
        n0 += 1
    gx, gy = _u_eps_grid(eps, density)
    min_fx = float(np.min(np.abs(F.x_family.dx(gx, gy))))
    R0 = math.inf if min_fx == 0.0 else min_fx ** (-n0)
    b_bound = float(np.max(np.abs(F.x_family.dy(gx, gy)))) + b_margin
    return ConeConfig(lambda0, lambda1, lambda2, gamma0, b_bound, R0, n0, eps)


@dataclass(frozen=True)
class ConeViolation:
    """A sample whose image cone left the predicted slope bound."""

    index: int
    x: float
    y: float
    n: int
    slope: float
    bound: float
    in_basin: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Serialize the violation."""
        return {
            "index": self.index,
            "x": self.x,
            "y": self.y,
            "n": self.n,
            "slope": self.slope,
            "bound": self.bound,
            "in_basin": self.in_basin,
        }


@dataclass(frozen=True)
class ConeReport:
    """Worst slope ratio and every violation of the cone bound."""

    samples: int
    max_slope_ratio: float
    violations: list[ConeViolation] = field(default_factory=list)

    @property
    def violations_outside_basins(self) -> list[ConeViolation]:
        """Violations at samples not attributed to a sink basin."""
        return [v for v in self.violations if not v.in_basin]

    def to_dict(self) -> dict[str, Any]:
        """Serialize the report."""
        return {
            "samples": self.samples,
            "max_slope_ratio": self.max_slope_ratio,
            "violations": [v.to_dict() for v in self.violations],
            "violations_outside_basins": len(self.violations_outside_basins),
        }


def cone_check(
    F: SkewMap,
    config: ConeConfig,
    samples: LambdaEpsSample,
    N: int,
    basin_mask: Optional[npt.NDArray[np.bool_]] = None,
) -> ConeReport:
    """Check slope(DF^n(1, +-gamma0)) <= 2 (lambda0/lambda1)^n gamma0 for n0 < n <= N."""
    if len(samples) == 0 or N <= config.n0:
        return ConeReport(len(samples), 0.0)
    traj = cocycle_trajectories(F, samples.x, samples.y, N)
    steps = np.arange(config.n0 + 1, N + 1)
    A, B, D = traj.A[steps], traj.B[steps], traj.D[steps]
    bound = 2.0 * (config.lambda0 / config.lambda1) ** steps * config.gamma0
    g = config.gamma0
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = np.maximum(
            np.abs(D * g) / np.abs(A + B * g), np.abs(D * g) / np.abs(A - B * g)
        )
        slopes = np.where(g == 0.0, 0.0, slopes)
        ratio = np.where(bound[:, None] > 0.0, slopes / bound[:, None], 0.0)
    ratio = np.nan_to_num(ratio, nan=np.inf)
    bad_step, bad_sample = np.nonzero(ratio > 1.0)
    violations = [
        ConeViolation(
            index=int(j),
            x=float(samples.x[j]),
            y=float(samples.y[j]),
            n=int(steps[k]),
            slope=float(slopes[k, j]),
            bound=float(bound[k]),
            in_basin=bool(basin_mask[j]) if basin_mask is not None else False,
        )
        for k, j in zip(bad_step, bad_sample, strict=True)
    ]
    return ConeReport(len(samples), float(np.max(ratio)), violations)


@dataclass(frozen=True)
class GrowthReport:
    """Samples failing |A_n| > lambda1^n for some n0 < n <= N."""

    samples: int
    failures: list[int]

    @property
    def passed(self) -> bool:
        """True when every sample expanded."""
        return not self.failures

    def to_dict(self) -> dict[str, Any]:
        """Serialize the report."""
        return {"samples": self.samples, "failures": list(self.failures), "passed": self.passed}


def growth_check(
    F: SkewMap, samples: LambdaEpsSample, N: int, lambda1: float, n0: int = 0
) -> GrowthReport:
    """Check the horizontal expansion |A_n| > lambda1^n for n0 < n <= N."""
    if len(samples) == 0 or N <= n0:
        return GrowthReport(len(samples), [])
    traj = cocycle_trajectories(F, samples.x, samples.y, N)
    steps = np.arange(n0 + 1, N + 1)
    expanded = np.abs(traj.A[steps]) > (lambda1**steps)[:, None]
    return GrowthReport(len(samples), [int(j) for j in np.flatnonzero(~expanded.all(axis=0))])


@dataclass(frozen=True)
class StableReport:
    """Worst value of |DF^n e| * gamma0 / |D_n| along the stable directions."""

    samples: int
    max_ratio: float
    violations: list[int]

    def to_dict(self) -> dict[str, Any]:
        """Serialize the report."""
        return {
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "violations": list(self.violations),
        }


def stable_contraction_check(
    F: SkewMap, samples: LambdaEpsSample, N: int, gamma0: float
) -> StableReport:
    """Iterate e = (-B_N/A_N, 1) and check |DF^n e| / |e| <= |D_n| / gamma0."""
    if len(samples) == 0 or N < 1 or gamma0 <= 0.0:
        return StableReport(len(samples), 0.0, [])
    traj = cocycle_trajectories(F, samples.x, samples.y, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        ex = -traj.B[N] / traj.A[N]
        norm_e = np.sqrt(ex * ex + 1.0)
        wx = traj.A[1:] * ex + traj.B[1:]
        growth = np.sqrt(wx * wx + traj.D[1:] ** 2) / norm_e
        ratio = growth * gamma0 / np.abs(traj.D[1:])
    ratio = np.nan_to_num(ratio, nan=np.inf)
    worst = ratio.max(axis=0)
    tolerance = 1.0 + 1e-9
    return StableReport(
        len(samples), float(worst.max()), [int(j) for j in np.flatnonzero(worst > tolerance)]
    )


@dataclass(frozen=True)
class HyperbolicConstants:
    """Fitted (C, lambda) with |A_n| >= lambda^-n / C and |D_n| <= C lambda^n."""

    C: float
    lam: float
    expansion_rate: float
    contraction_rate: float

    def to_dict(self) -> dict[str, Any]:
        """Serialize the constants."""
        return {
            "C": self.C,
            "lambda": self.lam,
            "expansion_rate": self.expansion_rate,
            "contraction_rate": self.contraction_rate,
        }


def fit_hyperbolic_constants(F: SkewMap, samples: LambdaEpsSample, N: int) -> HyperbolicConstants:
    """Fit the constants of the hyperbolic-set definition from measured growth.

    Raises:
        PreconditionError: If there are no samples or N < 1.
    """
    if len(samples) == 0 or N < 1:
        raise PreconditionError("fitting needs at least one sample and N >= 1")
    traj = cocycle_trajectories(F, samples.x, samples.y, N)
    steps = np.arange(1, N + 1)[:, None]
    abs_a = np.abs(traj.A[1:])
    abs_d = np.abs(traj.D[1:])
    expansion = float(np.nanmin(abs_a[-1] ** (1.0 / N)))
    contraction = float(np.nanmax(abs_d[-1] ** (1.0 / N)))
    c_u = float(np.nanmax(expansion**steps / abs_a))
    c_s = float(np.nanmax(abs_d / contraction**steps))
    lam = max(1.0 / expansion, contraction) if expansion > 0.0 else math.inf
    return HyperbolicConstants(max(c_u, c_s, 1.0), lam, expansion, contraction)


# --- Sinks ---


@dataclass(frozen=True)
class Region:
    """A rectangle of starting points, optionally with the strip |x| < eps removed."""

    x_lo: float = -1.0
    x_hi: float = 1.0
    y_lo: float = 0.0
    y_hi: float = 1.0
    eps: float = 0.0

    def grid(self, density: int) -> tuple[FloatArray, FloatArray]:
        """Return the grid starts inside the region."""
        gx, gy = np.meshgrid(
            np.linspace(self.x_lo, self.x_hi, density), np.linspace(self.y_lo, self.y_hi, density)
        )
        x, y = gx.ravel(), gy.ravel()
        keep = np.abs(x) >= self.eps
        return x[keep], y[keep]

    def to_dict(self) -> dict[str, Any]:
        """Serialize the region."""
        return {
            "x": [self.x_lo, self.x_hi],
            "y": [self.y_lo, self.y_hi],
            "eps": self.eps,
        }


@dataclass(frozen=True)
class SinkRecord:
    """An attracting periodic orbit found by the census."""

    sink_id: SinkId
    period: int
    orbit: list[SkewPoint]
    x_multiplier: float
    y_multiplier: float
    contraction_radius: float
    basin_samples: int = 0

    def to_dict(self) -> dict[str, Any]:
        """Serialize the record."""
        return {
            "sink_id": str(self.sink_id),
            "period": self.period,
            "orbit": [[p.x, p.y] for p in self.orbit],
            "x_multiplier": self.x_multiplier,
            "y_multiplier": self.y_multiplier,
            "contraction_radius": self.contraction_radius,
            "basin_samples": self.basin_samples,
        }


def iterate(F: SkewMap, p: SkewPoint, n: int) -> SkewPoint:
    """Apply F n times, taking the + side on x = 0."""
    for _ in range(n):
        p = F.eval(p if p.x != 0.0 else SkewPoint(p.x, p.y, Side.PLUS))
    return p


def _polish(F: SkewMap, q: SkewPoint, period: int, iterations: int = 400) -> Optional[SkewPoint]:
    for _ in range(iterations):
        image = iterate(F, q, period)
        dx, dy = image.x - q.x, image.y - q.y
        if max(abs(dx), abs(dy)) < 1e-14:
            return q
        q = SkewPoint(q.x + POLISH_DAMPING * dx, q.y + POLISH_DAMPING * dy)
        if not (-1.0 <= q.x <= 1.0 and 0.0 <= q.y <= 1.0):
            return None
    image = iterate(F, q, period)
    return q if max(abs(image.x - q.x), abs(image.y - q.y)) < 1e-10 else None


def _aligned(orbit: list[SkewPoint]) -> list[SkewPoint]:
    start = min(range(len(orbit)), key=lambda i: (orbit[i].x, orbit[i].y))
    return orbit[start:] + orbit[:start]


def _same_orbit(a: list[SkewPoint], b: list[SkewPoint], tol: float) -> bool:
    if len(a) != len(b):
        return False
    for shift in range(len(b)):
        rotated = b[shift:] + b[:shift]
        if all(
            abs(p.x - q.x) <= tol and abs(p.y - q.y) <= tol for p, q in zip(a, rotated, strict=True)
        ):
            return True
    return False


def _minimal_period(F: SkewMap, q: SkewPoint, period: int) -> int:
    for p in range(1, period + 1):
        if period % p:
            continue
        image = iterate(F, q, p)
        if abs(image.x - q.x) <= 1e-9 and abs(image.y - q.y) <= 1e-9:
            return p
    return period


def contraction_radius(
    F: SkewMap, q: SkewPoint, period: int, lambda2: float, ladder: int = 12
) -> float:
    """Return the largest probed radius whose circle F^period shrinks by lambda2^period.

    The radius starts at 0.05 and is halved up to `ladder` times; 0 means none passed.
    """
    angles = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
    radius = 0.05
    for _ in range(ladder):
        ok = True
        for theta in angles:
            probe = SkewPoint(
                q.x + radius * math.cos(theta), min(max(q.y + radius * math.sin(theta), 0.0), 1.0)
            )
            if not -1.0 <= probe.x <= 1.0:
                continue
            image = iterate(F, probe, period)
            if max(abs(image.x - q.x), abs(image.y - q.y)) > lambda2**period * radius:
                ok = False
                break
        if ok:
            return radius
        radius /= 2.0
    return 0.0


def _tails(
    F: SkewMap, x: FloatArray, y: FloatArray, transient: int, length: int
) -> tuple[FloatArray, FloatArray]:
    cx, cy = x.copy(), y.copy()
    tail_x, tail_y = np.empty((length + 1, x.size)), np.empty((length + 1, x.size))
    with np.errstate(invalid="ignore"):
        for _ in range(transient):
            cx, cy = F.step_arrays(cx, cy)
        tail_x[0], tail_y[0] = cx, cy
        for k in range(length):
            cx, cy = F.step_arrays(cx, cy)
            tail_x[k + 1], tail_y[k + 1] = cx, cy
    return tail_x, tail_y


def in_sink_basin(
    F: SkewMap,
    sinks: Sequence[SinkRecord],
    x: FloatArray,
    y: FloatArray,
    transient: int = 300,
    tol: float = 1e-6,
) -> list[Optional[SinkId]]:
    """Return, for every start, the sink whose orbit it converges to (or None)."""
    cx, cy = np.asarray(x, dtype=float).ravel().copy(), np.asarray(y, dtype=float).ravel().copy()
    with np.errstate(invalid="ignore"):
        for _ in range(transient):
            cx, cy = F.step_arrays(cx, cy)
    result: list[Optional[SinkId]] = [None] * cx.size
    for sink in sinks:
        for p in sink.orbit:
            close = (np.abs(cx - p.x) <= tol) & (np.abs(cy - p.y) <= tol)
            for j in np.flatnonzero(close):
                if result[j] is None:
                    result[j] = sink.sink_id
    return result


def sink_census(
    F: SkewMap,
    region: Region,
    max_period: int,
    tol: float = 1e-6,
    *,
    lambda0: Optional[float] = None,
    lambda2: float = 0.96,
    density: int = 60,
    transient: int = 300,
) -> list[SinkRecord]:
    """Find attracting periodic orbits reached from a grid over `region`.

    Candidates come from orbits that repeat to within `tol` after the
    transient; each is polished, verified (|A_p| < 1, |D_p| < lambda0^p),
    deduplicated up to phase, and probed for a contraction radius.
    """
    if max_period < 1:
        return []
    lam0 = lambda0 if lambda0 is not None else F.vertical.max_slope() + 1e-9
    x, y = region.grid(density)
    tail_x, tail_y = _tails(F, x, y, transient, max_period)
    periods = np.zeros(x.size, dtype=np.int64)
    for p in range(1, max_period + 1):
        hit = (np.abs(tail_x[p] - tail_x[0]) < tol) & (np.abs(tail_y[p] - tail_y[0]) < tol)
        periods = np.where((periods == 0) & hit, p, periods)

    found: list[tuple[int, list[SkewPoint], CocycleState]] = []
    tried: list[tuple[int, float, float]] = []
    for j in np.flatnonzero(periods):
        period = int(periods[j])
        qx, qy = float(tail_x[0, j]), float(tail_y[0, j])
        if any(
            tp == period and abs(tx - qx) < 1e-4 and abs(ty - qy) < 1e-4 for tp, tx, ty in tried
        ):
            continue
        tried.append((period, qx, qy))
        q = _polish(F, SkewPoint(qx, qy), period)
        if q is None:
            continue
        period = _minimal_period(F, q, period)
        try:
            rows = cocycle_trace(F, q, period)
        except NewhouseLabError:
            continue
        state = rows[-1].state
        if not (abs(state.A) < 1.0 and abs(state.D) < lam0**period):
            continue
        orbit = _aligned([SkewPoint(r.point.x, r.point.y) for r in rows[:-1]])
        if any(_same_orbit(orbit, other, SINK_DEDUP_TOL) for _, other, _ in found):
            continue
        found.append((period, orbit, state))

    found.sort(key=lambda item: (item[0], item[1][0].x, item[1][0].y))
    records = [
        SinkRecord(
            sink_id=sink_id_for(period, orbit[0].x, orbit[0].y),
            period=period,
            orbit=orbit,
            x_multiplier=state.A,
            y_multiplier=state.D,
            contraction_radius=contraction_radius(F, orbit[0], period, lambda2),
        )
        for period, orbit, state in found
    ]
    owners = in_sink_basin(F, records, x, y, transient, tol)
    counts = {r.sink_id: 0 for r in records}
    for owner in owners:
        if owner is not None:
            counts[owner] += 1
    return [
        SinkRecord(
            r.sink_id,
            r.period,
            r.orbit,
            r.x_multiplier,
            r.y_multiplier,
            r.contraction_radius,
            counts[r.sink_id],
        )
        for r in records
    ]
