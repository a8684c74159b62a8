"""This module defines the application service for non-hyperbolicity certificates.

CertificationService runs the certificate pipeline for one parameter set and
the thickness/linking sensitivity sweep over a grid of parameter sets.
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from itertools import product
from typing import Any

from newhouse_lab.application.decorators import emits
from newhouse_lab.application.dtos import (
    CertifyRunConfig,
    CommandResult,
    SweepRow,
    SweepRunConfig,
)
from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.application.report_publisher import ReportPublisher
from newhouse_lab.domain.bc_family import (
    CertificateStatus,
    RhoMode,
    certify_nonhyperbolic,
    heteroclinic_tangency_search,
    make_bc,
    stable_projection,
    unstable_projection,
)
from newhouse_lab.domain.errors import NewhouseLabError
from newhouse_lab.domain.events import CertificateIssued, ReportWritten, SweepCompleted
from newhouse_lab.domain.gap_lemma import GapLemmaOutcome, gap_lemma_decide
from newhouse_lab.domain.ids import RunId
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface
from newhouse_lab.ports.service_interfaces import CertificationServiceInterface

SWEEP_COLUMNS = ("t", "m", "c_rho", "tau_s", "tau_u", "tau_product", "link", "decision")


def sweep_instance(t: float, m: int, c_rho: float, g: int) -> SweepRow:
    """Measure both projected thicknesses and the linking case for one instance.

    Construction failures are recorded in the row's `decision` field.
    """
    row = SweepRow(t=t, m=m, c_rho=c_rho)
    try:
        F = make_bc(t, m, c_rho)
        decision = gap_lemma_decide(stable_projection(F, g), unstable_projection(F, g))
    except NewhouseLabError as e:
        row.decision = f"{type(e).__name__}: {e}"
        return row
    row.tau_s = decision.tau_a
    row.tau_u = decision.tau_b
    row.tau_product = decision.tau_product
    row.link = str(decision.link.case)
    row.decision = str(decision.outcome)
    return row


class CertificationService(CertificationServiceInterface):
    """Application service for certificate runs.

    Args:
        report_repo (ReportRepositoryInterface): Where reports are written.
        event_dispatcher (EventDispatcher): The dispatcher for domain events.
        threads (int): Upper bound on concurrent sweep instances.
    """

    def __init__(
        self,
        report_repo: ReportRepositoryInterface,
        event_dispatcher: EventDispatcher,
        threads: int = 1,
    ) -> None:
        self.publisher = ReportPublisher(report_repo, event_dispatcher)
        self.event_dispatcher = event_dispatcher
        self.threads = max(1, threads)

    @emits(CertificateIssued, ReportWritten)
    def certify(self, config: CertifyRunConfig, run_id: RunId) -> CommandResult:
        """Run the pipeline and write `certificate.json`.

        The exit code is 0 for Certified and 2 for Inconclusive.

        Raises:
            PreconditionError: If (t, m, c_rho) are out of range.
            LinkingViolated: If the strict linking inequality fails.
            UnimodalityViolated: If the interpolated family is not unimodal.
        """
        certificate = certify_nonhyperbolic(
            config.t,
            config.m,
            config.c_rho,
            config.generation,
            config.tol,
            config.steps,
            rho_mode=RhoMode(config.rho_mode),
            witness_tol=config.witness_tol,
            max_depth=config.max_depth,
        )
        data = certificate.to_dict()
        if config.tangency_k_max > 0:
            F = make_bc(config.t, config.m, config.c_rho, RhoMode(config.rho_mode))
            extra = () if certificate.witness_y is None else (certificate.witness_y,)
            hits = heteroclinic_tangency_search(
                F, config.generation, config.tangency_k_max, config.tangency_tol, extra
            )
            data["tangency_hits"] = [h.to_dict() for h in hits]

        self.event_dispatcher.dispatch(
            [
                CertificateIssued(
                    t=config.t,
                    m=config.m,
                    status=str(certificate.status),
                    reason=certificate.reason,
                    tau_product=certificate.tau_product,
                )
            ]
        )
        certified = certificate.status is CertificateStatus.CERTIFIED
        result = CommandResult(
            exit_code=0 if certified else 2,
            summary={
                "status": str(certificate.status),
                "reason": certificate.reason,
                "derived": certificate.params.to_dict(),
            },
        )
        result.reports["certificate"] = self.publisher.json(run_id, "certificate.json", data)
        return result

    def sensitivity_sweep(
        self, ts: Sequence[float], ms: Sequence[int], c_rhos: Sequence[float], g: int
    ) -> list[SweepRow]:
        """Run `sweep_instance` over the grid, in grid order."""
        grid = list(product(ts, ms, c_rhos))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(lambda p: sweep_instance(p[0], p[1], p[2], g), grid))

    @emits(SweepCompleted, ReportWritten)
    def sweep(self, config: SweepRunConfig, run_id: RunId) -> CommandResult:
        """Run the sensitivity sweep and write `sweep.csv`."""
        rows = self.sensitivity_sweep(config.ts, config.ms, config.c_rhos, config.generation)
        intersecting = sum(1 for r in rows if r.decision == GapLemmaOutcome.INTERSECT)
        self.event_dispatcher.dispatch(
            [SweepCompleted(instances=len(rows), certified=intersecting)]
        )
        table: list[list[Any]] = [
            [asdict(r)[column] for column in SWEEP_COLUMNS] for r in rows
        ]
        result = CommandResult(summary={"instances": len(rows), "intersecting": intersecting})
        result.reports["sweep"] = self.publisher.csv(run_id, "sweep.csv", SWEEP_COLUMNS, table)
        return result
