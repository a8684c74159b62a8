"""Global settings and numerical defaults for the lab.

Runtime options come from environment variables through pydantic-settings;
numerical defaults are grouped in plain namespace classes so they are easy to
find and adjust.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

TOOL_NAME = "newhouse-lab"
TOOL_VERSION = "0.1.0"


class LabSettings(BaseSettings):
    """Runtime settings, loaded from NEWHOUSE_LAB_* environment variables."""

    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    out_dir: str = "results"
    log_to_file: bool = True

    model_config = SettingsConfigDict(env_prefix="NEWHOUSE_LAB_")


# --- Numerical defaults ---
class Tolerances:
    """A namespace for tolerances shared by several commands."""

    conjugacy: float = 1e-12
    markov: float = 1e-12
    product_margin: float = 1e-9
    boundary: float = 1e-9
    sink_dedup: float = 1e-8
    sink_detect: float = 1e-6


TOLERANCES = Tolerances()


class CertifyDefaults:
    """A namespace for the certificate pipeline defaults."""

    t: float = 0.6
    m: int = 5
    c_rho: float = 1.05
    generation: int = 12
    tol: float = 1e-6
    steps: int = 1000
    witness_tol: float = 1e-10
    max_depth: int = 80


CERTIFY_DEFAULTS = CertifyDefaults()


class HyperDefaults:
    """A namespace for the hyperbolicity diagnostics defaults."""

    eps: float = 0.05
    grid_density: int = 200
    n_forward: int = 60
    n_backward: int = 5
    samples: int = 500
    lambda1: float = 0.9
    lambda2: float = 0.96
    gamma0: float = 0.1
    max_period: int = 8
    census_density: int = 60
    transient: int = 300


HYPER_DEFAULTS = HyperDefaults()


class PlotStyle:
    """A namespace for SVG figure styling."""

    width_in: float = 7.0
    height_in: float = 4.5
    cover_color: str = "#1f4e79"
    unstable_color: str = "#b03a2e"
    line_color: str = "#555555"
    witness_color: str = "#d4ac0d"
    orbit_color: str = "#117a65"
    hash_salt: str = "newhouse-lab"


PLOT_STYLE = PlotStyle()
