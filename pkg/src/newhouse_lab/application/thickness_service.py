"""This module defines the application service for Cantor-set use cases.

ThicknessService builds covers from system specifications, measures their
thickness and decides the gap lemma for pairs of covers.
"""

import dataclasses
from typing import Any, Optional

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.dtos import (
    CommandResult,
    GapLemmaRunConfig,
    SystemSpec,
    ThicknessRunConfig,
)
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.report_publisher import ReportPublisher
from newhouse_lab.domain.errors import ConfigError, NewhouseLabError
from newhouse_lab.domain.events import GapLemmaDecided, ReportWritten, ThicknessMeasured
from newhouse_lab.domain.gap_lemma import GapLemmaOutcome, gap_lemma_decide, intersect_refine
from newhouse_lab.domain.ids import RunId
from newhouse_lab.domain.interval_cantor import (
    CantorApproximation,
    MarkovSystem,
    affine_image,
    affine_two_branch,
    k_t_thickness,
    member,
    middle_thirds,
    refine,
    tent_cross_check,
    tent_system,
    thickness,
    vertical_system,
)
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface
from newhouse_lab.ports.service_interfaces import PlotterInterface, ThicknessServiceInterface


def _require(spec: SystemSpec, name: str) -> Any:
    value = getattr(spec, name)
    if value is None:
        raise ConfigError(f"preset {spec.preset!r} needs '{name}'")
    return value


def build_system(spec: SystemSpec) -> MarkovSystem:
    """Build the MarkovSystem a specification describes.

    Raises:
        ConfigError: If a preset parameter is missing or the branches are malformed.
    """
    if spec.branches is not None:
        try:
            system = MarkovSystem.from_dict({"branches": spec.branches})
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid branch list: {e}") from e
    elif spec.preset == "middle_thirds":
        system = middle_thirds()
    elif spec.preset == "vertical":
        system = vertical_system(float(_require(spec, "t")))
    elif spec.preset == "tent":
        system = tent_system(int(_require(spec, "m")))
    else:
        system = affine_two_branch(float(_require(spec, "a")), float(_require(spec, "b")))
    if spec.label is not None:
        system = dataclasses.replace(system, label=spec.label)
    return system


def cover_for(spec: SystemSpec, system: MarkovSystem, g: int) -> CantorApproximation:
    """Refine `system` to generation g and apply the spec's affine placement."""
    cover = refine(system, g)
    if spec.alpha != 1.0 or spec.beta != 0.0:
        cover = affine_image(cover, spec.alpha, spec.beta)
    return cover


class ThicknessService(ThicknessServiceInterface):
    """Application service for thickness and gap-lemma runs.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
        plotter (PlotterInterface): Renders optional SVG figures.
    """

    def __init__(
        self,
        report_repo: ReportRepositoryInterface,
        event_dispatcher: EventDispatcher,
        plotter: PlotterInterface,
    ) -> None:
        self.publisher = ReportPublisher(report_repo, event_dispatcher)
        self.event_dispatcher = event_dispatcher
        self.plotter = plotter

    @emits(ThicknessMeasured, ReportWritten)
    def thickness(self, config: ThicknessRunConfig, run_id: RunId) -> CommandResult:
        """Measure thickness at every requested generation.

        Vertical systems are compared with t / (2(1 - t)); tent systems get the
        2^(m-1) - 3 cross-check, whose deviation is reported with the witness
        gap and bridge.

        Raises:
            ConfigError: If the system specification is incomplete.
            NoBoundedGap: If a requested generation has no bounded gap.
        """
        system = build_system(config.system)
        rows: list[dict[str, Any]] = []
        events: list[ThicknessMeasured] = []
        last: Optional[CantorApproximation] = None
        for g in config.generations:
            last = cover_for(config.system, system, g)
            report = thickness(last)
            row: dict[str, Any] = {"intervals": len(last), **report.to_dict()}
            if config.system.preset == "vertical" and config.system.alpha == 1.0:
                expected = k_t_thickness(float(_require(config.system, "t")))
                row["closed_form"] = expected
                row["closed_form_deviation"] = abs(report.tau - expected)
            if config.cross_check and config.system.preset == "tent":
                row["cross_check"] = tent_cross_check(
                    int(_require(config.system, "m")), g
                ).to_dict()
            rows.append(row)
            events.append(ThicknessMeasured(label=system.label, generation=g, tau=report.tau))
        self.event_dispatcher.dispatch(events)

        result = CommandResult(summary={"taus": [r["tau"] for r in rows]})
        data = {
            "system": system.to_dict(),
            "placement": {"alpha": config.system.alpha, "beta": config.system.beta},
            "generations": rows,
        }
        result.reports["thickness"] = self.publisher.json(run_id, "thickness.json", data)
        if config.svg and last is not None:
            figure = self.plotter.render_cover(last, f"{system.label}, g={last.generation}")
            result.reports["thickness_svg"] = self.publisher.svg(run_id, "thickness.svg", figure)
        return result

    @emits(GapLemmaDecided, ReportWritten)
    def gap_lemma(self, config: GapLemmaRunConfig, run_id: RunId) -> CommandResult:
        """Decide the gap lemma for two covers and look for a witness.

        A failed witness search is reported next to the decision rather than
        raised.

        Raises:
            ConfigError: If a system specification is incomplete.
            NoBoundedGap: If either cover has no bounded gap.
        """
        first_system = build_system(config.first)
        second_system = build_system(config.second)
        first = cover_for(config.first, first_system, config.generation)
        second = cover_for(config.second, second_system, config.generation)
        decision = gap_lemma_decide(first, second)
        self.event_dispatcher.dispatch(
            [
                GapLemmaDecided(
                    outcome=str(decision.outcome),
                    tau_product=decision.tau_product,
                    link=str(decision.link.case),
                )
            ]
        )
        data: dict[str, Any] = {
            "first": first_system.to_dict(),
            "second": second_system.to_dict(),
            "decision": decision.to_dict(),
            "witness": None,
            "witness_error": None,
        }
        if decision.outcome is GapLemmaOutcome.INTERSECT:
            try:
                witness = intersect_refine(first, second, config.witness_tol, config.max_depth)
            except NewhouseLabError as e:
                data["witness_error"] = f"{type(e).__name__}: {e}"
            else:
                data["witness"] = witness.to_dict()
                data["witness_member"] = {
                    "first": member(
                        first, witness.point, 2 * config.witness_tol, len(witness.word_a) - 1
                    ),
                    "second": member(
                        second, witness.point, 2 * config.witness_tol, len(witness.word_b) - 1
                    ),
                }
        result = CommandResult(summary={"outcome": str(decision.outcome)})
        result.reports["gaplemma"] = self.publisher.json(run_id, "gaplemma.json", data)
        return result
