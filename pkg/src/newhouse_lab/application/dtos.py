"""This module defines the run configurations and result DTOs of the application layer.

Run configurations are pydantic models, one per command, validated from the
JSON file given with `--config` and overridden by command-line flags.
"""

from dataclasses import dataclass, field
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from newhouse_lab.settings import CERTIFY_DEFAULTS, HYPER_DEFAULTS


class RunConfig(BaseModel):
    """Fields shared by every command."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    tolerances: dict[str, float] = Field(default_factory=dict)
    out: Optional[str] = None


class ExplicitFamilyConfig(BaseModel):
    """The explicit family F^t."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["explicit_bc"] = "explicit_bc"
    t: float = CERTIFY_DEFAULTS.t
    m: int = CERTIFY_DEFAULTS.m
    c_rho: float = CERTIFY_DEFAULTS.c_rho
    rho_mode: Literal["scaled", "three_halves"] = "scaled"


class QuadraticPeakConfig(BaseModel):
    """f(x, y) = p0 + p1*y - a*x^2."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["quadratic_peak"] = "quadratic_peak"
    p0: float
    p1: float = 0.0
    a: float


class UserFamilyConfig(BaseModel):
    """A user-configured skew map."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["user"] = "user"
    x_family: QuadraticPeakConfig
    vertical: dict[str, Any]
    strip: float = 0.0


FamilyConfig = Annotated[
    Union[ExplicitFamilyConfig, UserFamilyConfig], Field(discriminator="kind")
]


class SystemSpec(BaseModel):
    """A Markov system given by preset or by branches, with an affine placement."""

    model_config = ConfigDict(extra="forbid")

    preset: Optional[Literal["middle_thirds", "vertical", "tent", "affine"]] = None
    t: Optional[float] = None
    m: Optional[int] = None
    a: Optional[float] = None
    b: Optional[float] = None
    label: Optional[str] = None
    branches: Optional[list[dict[str, Any]]] = None
    alpha: float = 1.0
    beta: float = 0.0

    @model_validator(mode="after")
    def check_source(self) -> "SystemSpec":
        """Require exactly one of `preset` and `branches`."""
        if (self.preset is None) == (self.branches is None):
            raise ValueError("give exactly one of 'preset' or 'branches'")
        return self


class ThicknessRunConfig(RunConfig):
    """Configuration of the `thickness` command."""

    system: SystemSpec = Field(default_factory=lambda: SystemSpec(preset="middle_thirds"))
    generations: list[int] = Field(default_factory=lambda: [10])
    cross_check: bool = True
    svg: bool = False


class GapLemmaRunConfig(RunConfig):
    """Configuration of the `gaplemma` command."""

    first: SystemSpec
    second: SystemSpec
    generation: int = 8
    witness_tol: float = 1e-10
    max_depth: int = 60


class CertifyRunConfig(RunConfig):
    """Configuration of the `certify` command."""

    t: float = CERTIFY_DEFAULTS.t
    m: int = CERTIFY_DEFAULTS.m
    c_rho: float = CERTIFY_DEFAULTS.c_rho
    rho_mode: Literal["scaled", "three_halves"] = "scaled"
    generation: int = CERTIFY_DEFAULTS.generation
    tol: float = CERTIFY_DEFAULTS.tol
    steps: int = CERTIFY_DEFAULTS.steps
    witness_tol: float = CERTIFY_DEFAULTS.witness_tol
    max_depth: int = CERTIFY_DEFAULTS.max_depth
    tangency_k_max: int = 0
    tangency_tol: float = 1e-6


class HyperRunConfig(RunConfig):
    """Configuration of the `hyper` command."""

    family: FamilyConfig = Field(default_factory=ExplicitFamilyConfig)
    eps: float = HYPER_DEFAULTS.eps
    grid_density: int = HYPER_DEFAULTS.grid_density
    n_forward: int = HYPER_DEFAULTS.n_forward
    n_backward: int = HYPER_DEFAULTS.n_backward
    samples: int = HYPER_DEFAULTS.samples
    N: int = HYPER_DEFAULTS.n_forward
    lambda1: float = HYPER_DEFAULTS.lambda1
    lambda2: float = HYPER_DEFAULTS.lambda2
    gamma0: float = HYPER_DEFAULTS.gamma0
    max_period: int = HYPER_DEFAULTS.max_period
    census_density: int = HYPER_DEFAULTS.census_density
    transient: int = HYPER_DEFAULTS.transient
    flatten_eps: Optional[float] = None


class ReturnsRunConfig(RunConfig):
    """Configuration of the `returns` command."""

    family: FamilyConfig = Field(default_factory=ExplicitFamilyConfig)
    eps: Optional[float] = None
    generation: int = 4
    budget: int = 20
    flatten: bool = False
    markov_level: Optional[int] = None
    census: bool = False
    max_period: int = HYPER_DEFAULTS.max_period


class OrbitRunConfig(RunConfig):
    """Configuration of the `orbit` command."""

    family: FamilyConfig = Field(default_factory=ExplicitFamilyConfig)
    x: float = 1.0
    y: float = 0.0
    side: Literal["+", "-", "none"] = "none"
    n: int = 10


class PlotRunConfig(RunConfig):
    """Configuration of the `plot` command."""

    t: float = CERTIFY_DEFAULTS.t
    m: int = CERTIFY_DEFAULTS.m
    c_rho: float = CERTIFY_DEFAULTS.c_rho
    rho_mode: Literal["scaled", "three_halves"] = "scaled"
    generation: int = 8
    witness: bool = True
    orbit_steps: int = 0


class SweepRunConfig(RunConfig):
    """Configuration of the `sweep` command."""

    ts: list[float] = Field(default_factory=lambda: [0.3, 0.45, 0.6, 0.75])
    ms: list[int] = Field(default_factory=lambda: [4, 5])
    c_rhos: list[float] = Field(default_factory=lambda: [CERTIFY_DEFAULTS.c_rho])
    generation: int = 10


@dataclass
class SweepRow:
    """One (t, m, c_rho) instance of a sensitivity sweep.

    Attributes:
        t (float): The vertical contraction parameter.
        m (int): The tent-set index.
        c_rho (float): The linking-margin factor.
        tau_s (Optional[float]): Thickness of the stable Cantor set.
        tau_u (Optional[float]): Thickness of the unstable Cantor set.
        tau_product (Optional[float]): The product of both thicknesses.
        link (Optional[str]): The linking case.
        decision (str): The gap-lemma outcome or the construction error.
    """

    t: float
    m: int
    c_rho: float
    tau_s: Optional[float] = None
    tau_u: Optional[float] = None
    tau_product: Optional[float] = None
    link: Optional[str] = None
    decision: str = ""


@dataclass
class CommandResult:
    """What a command produced.

    Attributes:
        exit_code (int): 0 on success, 2 for an Inconclusive certificate.
        reports (dict[str, str]): Report kind mapped to the written file path.
        summary (dict[str, Any]): A small summary for the lifecycle log.
    """

    exit_code: int = 0
    reports: dict[str, str] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
