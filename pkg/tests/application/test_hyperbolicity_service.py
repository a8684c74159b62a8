from unittest.mock import Mock

import pytest

from newhouse_lab.application.dtos import HyperRunConfig
from newhouse_lab.application.hyperbolicity_service import SINK_COLUMNS, HyperbolicityService
from newhouse_lab.domain.events import HyperbolicityAssessed, SinkCensusCompleted
from newhouse_lab.domain.hyperbolicity import REFILL_BATCH
from newhouse_lab.domain.ids import run_id_for

RUN_ID = run_id_for("{}")


@pytest.fixture
def hyperbolicity_service(
    mock_report_repo: Mock, mock_event_dispatcher: Mock
) -> HyperbolicityService:
    """Provides a HyperbolicityService instance with mocked dependencies."""
    return HyperbolicityService(mock_report_repo, mock_event_dispatcher)


def _config(family: dict, **overrides) -> HyperRunConfig:
    small = {
        "family": family,
        "eps": 0.1,
        "grid_density": 10,
        "n_forward": 5,
        "n_backward": 0,
        "samples": 100,
        "N": 10,
        "max_period": 2,
        "census_density": 10,
    }
    return HyperRunConfig.model_validate({**small, **overrides})


def test_all_violations_of_the_sink_map_lie_in_its_basin(
    hyperbolicity_service: HyperbolicityService,
    mock_report_repo: Mock,
    mock_event_dispatcher: Mock,
    sink_family: dict,
):
    # Act
    result = hyperbolicity_service.assess(_config(sink_family), RUN_ID)

    # Assert
    assert result.summary == {
        "samples": 100,
        "violations_outside_basins": 0,
        "sinks": 1,
        "derived": {},
    }
    assert result.reports == {"hyper": "/out/hyper.json", "sinks": "/out/sinks.csv"}
    data = mock_report_repo.write_json.call_args.args[1]
    assert data["cone"]["violations"]
    assert data["sinks"][0]["basin_samples"] == 100
    assert data["cone_config"]["n0"] == 2
    assert data["flattened"] is None
    name, header, rows = mock_report_repo.write_csv.call_args.args
    assert header == SINK_COLUMNS
    assert [row[1] for row in rows] == ["F"]
    events = [e for c in mock_event_dispatcher.dispatch.call_args_list for e in c.args[0]]
    assert any(isinstance(e, SinkCensusCompleted) and e.sinks == 1 for e in events)
    assessed = next(e for e in events if isinstance(e, HyperbolicityAssessed))
    assert assessed.growth_failures == 100


def test_flattened_census_is_listed_under_g(
    hyperbolicity_service: HyperbolicityService, mock_report_repo: Mock, sink_family: dict
):
    hyperbolicity_service.assess(_config(sink_family, flatten_eps=0.1), RUN_ID)

    data = mock_report_repo.write_json.call_args.args[1]
    assert data["flattened"]["eps"] == 0.1
    assert data["flattened"]["super_attracting"] == 0
    rows = mock_report_repo.write_csv.call_args.args[2]
    assert [row[1] for row in rows] == ["F", "G"]


def test_eps_beyond_the_square_gives_vacuous_reports(
    hyperbolicity_service: HyperbolicityService, mock_report_repo: Mock, sink_family: dict
):
    # Act
    result = hyperbolicity_service.assess(_config(sink_family, eps=1.5), RUN_ID)

    # Assert
    assert result.summary["samples"] == 0
    data = mock_report_repo.write_json.call_args.args[1]
    assert data["cone_config"] is None
    assert data["constants"] is None
    assert data["pliss"] is None
    assert data["cone"]["violations"] == []
    assert data["growth"]["passed"] is True
    assert data["sampling"]["shortfall"] == 100


def test_grid_survivors_are_topped_up_to_the_requested_count(
    hyperbolicity_service: HyperbolicityService, mock_report_repo: Mock, sink_family: dict
):
    # Act
    result = hyperbolicity_service.assess(_config(sink_family, samples=150, seed=3), RUN_ID)

    # Assert
    assert result.summary["samples"] == 150
    data = mock_report_repo.write_json.call_args.args[1]
    assert data["sampling"] == {
        "requested": 150,
        "found": 150,
        "shortfall": 0,
        "grid_density": 10,
        "random_draws": REFILL_BATCH,
    }
