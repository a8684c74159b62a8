from unittest.mock import Mock

import pytest

from newhouse_lab.application.certification_service import (
    SWEEP_COLUMNS,
    CertificationService,
    sweep_instance,
)
from newhouse_lab.application.dtos import CertifyRunConfig, SweepRunConfig
from newhouse_lab.domain.errors import LinkingViolated
from newhouse_lab.domain.events import CertificateIssued, ReportWritten, SweepCompleted
from newhouse_lab.domain.ids import run_id_for

RUN_ID = run_id_for("{}")


@pytest.fixture
def certification_service(
    mock_report_repo: Mock, mock_event_dispatcher: Mock
) -> CertificationService:
    """Provides a CertificationService instance with mocked dependencies."""
    return CertificationService(mock_report_repo, mock_event_dispatcher, threads=2)


def _dispatched(mock_event_dispatcher: Mock) -> list:
    return [e for call in mock_event_dispatcher.dispatch.call_args_list for e in call.args[0]]


def test_default_instance_is_certified(
    certification_service: CertificationService,
    mock_report_repo: Mock,
    mock_event_dispatcher: Mock,
):
    # Act
    result = certification_service.certify(CertifyRunConfig(steps=200), RUN_ID)

    # Assert
    assert result.exit_code == 0
    assert result.summary["status"] == "Certified"
    assert result.summary["derived"]["delta_m"] == pytest.approx(1.0 / 31.0)
    assert result.reports == {"certificate": "/out/certificate.json"}
    name, data = mock_report_repo.write_json.call_args.args
    assert name == "certificate.json"
    assert "tangency_hits" not in data
    events = _dispatched(mock_event_dispatcher)
    assert isinstance(events[0], CertificateIssued)
    assert events[0].status == "Certified"
    assert isinstance(events[-1], ReportWritten)


def test_thin_instance_exits_with_two(
    certification_service: CertificationService, mock_report_repo: Mock
):
    config = CertifyRunConfig(t=0.3, m=4, generation=10, steps=200, tangency_k_max=1)

    result = certification_service.certify(config, RUN_ID)

    assert result.exit_code == 2
    assert result.summary["status"] == "Inconclusive"
    data = mock_report_repo.write_json.call_args.args[1]
    assert isinstance(data["tangency_hits"], list)
    assert all(hit["k"] == 1 for hit in data["tangency_hits"])


def test_construction_errors_are_raised_by_certify(certification_service: CertificationService):
    with pytest.raises(LinkingViolated):
        certification_service.certify(CertifyRunConfig(c_rho=5.0), RUN_ID)


def test_sweep_instance_records_construction_errors():
    row = sweep_instance(0.6, 5, 5.0, 4)

    assert row.decision.startswith("LinkingViolated: ")
    assert row.tau_product is None


def test_sensitivity_sweep_keeps_grid_order(certification_service: CertificationService):
    # Act
    rows = certification_service.sensitivity_sweep([0.6], [4, 5], [1.05, 5.0], 6)

    # Assert
    assert [(r.m, r.c_rho) for r in rows] == [(4, 1.05), (4, 5.0), (5, 1.05), (5, 5.0)]
    assert rows[2].tau_product == pytest.approx(rows[2].tau_s * rows[2].tau_u)
    assert rows[2].link == "Linked"
    assert rows[3].decision.startswith("LinkingViolated")


def test_sweep_writes_the_table(
    certification_service: CertificationService,
    mock_report_repo: Mock,
    mock_event_dispatcher: Mock,
):
    # Arrange
    config = SweepRunConfig(ts=[0.6], ms=[5], c_rhos=[1.05, 5.0], generation=6)

    # Act
    result = certification_service.sweep(config, RUN_ID)

    # Assert
    name, header, table = mock_report_repo.write_csv.call_args.args
    assert name == "sweep.csv"
    assert header == SWEEP_COLUMNS
    assert [row[:3] for row in table] == [[0.6, 5, 1.05], [0.6, 5, 5.0]]
    assert table[1][-1].startswith("LinkingViolated")
    assert result.summary["instances"] == 2
    assert result.reports == {"sweep": "/out/sweep.csv"}
    completed = [e for e in _dispatched(mock_event_dispatcher) if isinstance(e, SweepCompleted)]
    assert completed[0].instances == 2
    assert completed[0].certified == result.summary["intersecting"]
