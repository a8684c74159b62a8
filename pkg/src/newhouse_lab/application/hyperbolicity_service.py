"""This module defines the application service for the hyperbolicity diagnostics.

HyperbolicityService samples Lambda_eps, runs the sink census, checks the cone
field, horizontal growth and stable contraction, fits hyperbolic constants and
scans one sample orbit for Pliss times.
"""

import dataclasses
from collections import Counter
from typing import Any, Optional

import numpy as np

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.dtos import CommandResult, HyperRunConfig
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.families import skew_map_for
from newhouse_lab.application.report_publisher import ReportPublisher
from newhouse_lab.domain.bc_family import SkewMap
from newhouse_lab.domain.critical_dynamics import flatten
from newhouse_lab.domain.errors import PreconditionError
from newhouse_lab.domain.events import (
    HyperbolicityAssessed,
    ReportWritten,
    SinkCensusCompleted,
)
from newhouse_lab.domain.hyperbolicity import (
    ConeConfig,
    ConeReport,
    GrowthReport,
    LambdaEpsSample,
    PlissReport,
    Region,
    SinkRecord,
    cocycle_trajectories,
    cone_check,
    derive_cone_config,
    fit_hyperbolic_constants,
    growth_check,
    in_sink_basin,
    pliss_times,
    sample_lambda_eps,
    sink_census,
    stable_contraction_check,
)
from newhouse_lab.domain.ids import RunId
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface
from newhouse_lab.ports.service_interfaces import HyperbolicityServiceInterface

SINK_COLUMNS = (
    "sink_id",
    "map",
    "period",
    "x",
    "y",
    "x_multiplier",
    "y_multiplier",
    "contraction_radius",
    "basin_samples",
)


def orbit_pliss(
    F: SkewMap, samples: LambdaEpsSample, N: int, gamma0: float, gamma1: float
) -> Optional[PlissReport]:
    """Pliss times of 1/|f_x| along the first sample's orbit, or None."""
    if len(samples) == 0 or N < 1:
        return None
    traj = cocycle_trajectories(F, samples.x[:1], samples.y[:1], N)
    with np.errstate(divide="ignore"):
        sequence = 1.0 / np.abs(F.x_family.dx(traj.x[:-1, 0], traj.y[:-1, 0]))
    if not np.all(np.isfinite(sequence)):
        return None
    try:
        return pliss_times(sequence.tolist(), gamma0, gamma1)
    except PreconditionError:
        return None


class HyperbolicityService(HyperbolicityServiceInterface):
    """Application service for `hyper` runs.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
    """

    def __init__(
        self, report_repo: ReportRepositoryInterface, event_dispatcher: EventDispatcher
    ) -> None:
        self.publisher = ReportPublisher(report_repo, event_dispatcher)
        self.event_dispatcher = event_dispatcher

    def census(
        self, F: SkewMap, config: HyperRunConfig, lambda0: Optional[float]
    ) -> list[SinkRecord]:
        """Run the sink census over the unit square."""
        sinks = sink_census(
            F,
            Region(),
            config.max_period,
            lambda0=lambda0,
            lambda2=config.lambda2,
            density=config.census_density,
            transient=config.transient,
        )
        self.event_dispatcher.dispatch(
            [SinkCensusCompleted(sinks=len(sinks), max_period=config.max_period)]
        )
        return sinks

    @emits(HyperbolicityAssessed, SinkCensusCompleted, ReportWritten)
    def assess(self, config: HyperRunConfig, run_id: RunId) -> CommandResult:
        """Run every diagnostic and write `hyper.json` and `sinks.csv`.

        Grid survivors are topped up with seeded random starts until
        `samples` points are found; `hyper.json` reports any shortfall. An
        empty sample (for instance eps > 1) yields vacuous reports.

        Raises:
            ConfigError: If the family config is malformed.
            ConeConfigError: If the derived cone constants are inconsistent.
        """
        F = skew_map_for(config.family)
        sample = sample_lambda_eps(
            F,
            config.eps,
            config.grid_density,
            config.n_forward,
            config.n_backward,
            target=config.samples,
            seed=config.seed,
        ).subsample(config.samples, config.seed)

        cone_config: Optional[ConeConfig] = None
        if len(sample) > 0:
            cone_config = derive_cone_config(
                F, config.eps, config.lambda1, config.lambda2, config.gamma0
            )
        lambda0 = cone_config.lambda0 if cone_config is not None else None
        sinks = self.census(F, config, lambda0)
        owners = in_sink_basin(F, sinks, sample.x, sample.y, config.transient)
        counts = Counter(owner for owner in owners if owner is not None)
        sinks = [dataclasses.replace(s, basin_samples=counts[s.sink_id]) for s in sinks]
        mask = np.array([owner is not None for owner in owners], dtype=bool)

        if cone_config is not None:
            cone = cone_check(F, cone_config, sample, config.N, mask)
            growth = growth_check(F, sample, config.N, config.lambda1, cone_config.n0)
        else:
            cone = ConeReport(0, 0.0)
            growth = GrowthReport(0, [])
        stable = stable_contraction_check(F, sample, config.N, config.gamma0)
        constants = fit_hyperbolic_constants(F, sample, config.N) if len(sample) > 0 else None
        pliss = orbit_pliss(F, sample, config.N, config.lambda1, config.lambda2)

        flat_sinks: list[SinkRecord] = []
        if config.flatten_eps is not None:
            flat_sinks = self.census(flatten(F, config.flatten_eps), config, lambda0)

        self.event_dispatcher.dispatch(
            [
                HyperbolicityAssessed(
                    samples=len(sample),
                    max_slope_ratio=cone.max_slope_ratio,
                    violations_outside_basins=len(cone.violations_outside_basins),
                    growth_failures=len(growth.failures),
                )
            ]
        )
        data: dict[str, Any] = {
            "family": F.to_dict(),
            "eps": config.eps,
            "samples": len(sample),
            "sampling": sample.to_dict(),
            "cone_config": cone_config.to_dict() if cone_config else None,
            "cone": cone.to_dict(),
            "growth": growth.to_dict(),
            "stable": stable.to_dict(),
            "constants": constants.to_dict() if constants else None,
            "pliss": pliss.to_dict() if pliss else None,
            "sinks": [s.to_dict() for s in sinks],
            "flattened": None,
        }
        if config.flatten_eps is not None:
            data["flattened"] = {
                "eps": config.flatten_eps,
                "sinks": [s.to_dict() for s in flat_sinks],
                "super_attracting": sum(1 for s in flat_sinks if s.x_multiplier == 0.0),
            }
        rows = [
            [
                str(s.sink_id),
                label,
                s.period,
                s.orbit[0].x,
                s.orbit[0].y,
                s.x_multiplier,
                s.y_multiplier,
                s.contraction_radius,
                s.basin_samples,
            ]
            for label, group in (("F", sinks), ("G", flat_sinks))
            for s in group
        ]
        result = CommandResult(
            summary={
                "samples": len(sample),
                "violations_outside_basins": len(cone.violations_outside_basins),
                "sinks": len(sinks),
                "derived": F.params.to_dict() if F.params else {},
            }
        )
        result.reports["hyper"] = self.publisher.json(run_id, "hyper.json", data)
        result.reports["sinks"] = self.publisher.csv(run_id, "sinks.csv", SINK_COLUMNS, rows)
        return result
