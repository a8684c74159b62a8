from unittest.mock import Mock

import pytest

from newhouse_lab.application.dtos import GapLemmaRunConfig, SystemSpec, ThicknessRunConfig
from newhouse_lab.application.thickness_service import (
    ThicknessService,
    build_system,
    cover_for,
)
from newhouse_lab.domain.errors import ConfigError
from newhouse_lab.domain.events import GapLemmaDecided, ThicknessMeasured
from newhouse_lab.domain.ids import run_id_for
from newhouse_lab.ports.service_interfaces import PlotterInterface

RUN_ID = run_id_for("{}")


@pytest.fixture
def mock_plotter() -> Mock:
    """Provides a mock plotter returning a fixed figure."""
    plotter = Mock(spec=PlotterInterface)
    plotter.render_cover.return_value = "<svg/>"
    return plotter


@pytest.fixture
def thickness_service(
    mock_report_repo: Mock, mock_event_dispatcher: Mock, mock_plotter: Mock
) -> ThicknessService:
    """Provides a ThicknessService instance with mocked dependencies."""
    return ThicknessService(mock_report_repo, mock_event_dispatcher, mock_plotter)


def _written(mock_report_repo: Mock, name: str) -> dict:
    for call in mock_report_repo.write_json.call_args_list:
        if call.args[0] == name:
            return call.args[1]
    raise AssertionError(f"{name} was not written")


def test_middle_thirds_thickness_is_one_at_every_generation(
    thickness_service: ThicknessService, mock_report_repo: Mock, mock_event_dispatcher: Mock
):
    # Arrange
    config = ThicknessRunConfig(generations=[0, 3])

    # Act
    result = thickness_service.thickness(config, RUN_ID)

    # Assert
    assert result.summary["taus"] == [pytest.approx(1.0), pytest.approx(1.0)]
    assert result.reports == {"thickness": "/out/thickness.json"}
    data = _written(mock_report_repo, "thickness.json")
    assert data["system"]["label"] == "middle-thirds"
    assert [row["intervals"] for row in data["generations"]] == [2, 16]
    events = mock_event_dispatcher.dispatch.call_args_list[0].args[0]
    assert [e.generation for e in events] == [0, 3]
    assert all(isinstance(e, ThicknessMeasured) for e in events)


def test_vertical_preset_is_compared_with_the_closed_form(
    thickness_service: ThicknessService, mock_report_repo: Mock
):
    config = ThicknessRunConfig(system=SystemSpec(preset="vertical", t=0.8), generations=[2])

    thickness_service.thickness(config, RUN_ID)

    row = _written(mock_report_repo, "thickness.json")["generations"][0]
    assert row["closed_form"] == pytest.approx(2.0)
    assert row["closed_form_deviation"] == pytest.approx(0.0, abs=1e-9)


def test_tent_preset_reports_the_cross_check(
    thickness_service: ThicknessService, mock_report_repo: Mock
):
    config = ThicknessRunConfig(system=SystemSpec(preset="tent", m=4), generations=[0])

    thickness_service.thickness(config, RUN_ID)

    check = _written(mock_report_repo, "thickness.json")["generations"][0]["cross_check"]
    assert check["expected"] == pytest.approx(5.0)
    assert check["measured"] == pytest.approx(3.0)
    assert check["within_tolerance"] is False


def test_svg_is_rendered_for_the_last_generation(
    thickness_service: ThicknessService, mock_plotter: Mock, mock_report_repo: Mock
):
    config = ThicknessRunConfig(generations=[1, 2], svg=True)

    result = thickness_service.thickness(config, RUN_ID)

    cover, title = mock_plotter.render_cover.call_args.args
    assert cover.generation == 2
    assert title == "middle-thirds, g=2"
    mock_report_repo.write_text.assert_called_once_with("thickness.svg", "<svg/>")
    assert result.reports["thickness_svg"] == "/out/thickness.svg"


def test_missing_preset_parameter_is_a_config_error(thickness_service: ThicknessService):
    config = ThicknessRunConfig(system=SystemSpec(preset="tent"))

    with pytest.raises(ConfigError):
        thickness_service.thickness(config, RUN_ID)


def test_build_system_from_branches_with_a_label():
    def affine(alpha: float, beta: float) -> dict:
        return {"kind": "affine", "params": {"alpha": alpha, "beta": beta}}

    spec = SystemSpec(
        branches=[
            {"domain": [0.0, 0.25], "map": affine(4.0, 0.0)},
            {"domain": [0.5, 1.0], "map": affine(2.0, -1.0)},
        ],
        label="uneven",
        alpha=2.0,
    )

    system = build_system(spec)
    cover = cover_for(spec, system, 0)

    assert system.label == "uneven"
    assert cover.lo[0] == pytest.approx(0.0)
    assert cover.hi[-1] == pytest.approx(2.0)


def test_malformed_branches_are_a_config_error():
    with pytest.raises(ConfigError):
        build_system(SystemSpec(branches=[{"domain": [0.0, 0.5]}]))


def test_gap_lemma_on_identical_thick_sets_finds_a_witness(
    thickness_service: ThicknessService, mock_report_repo: Mock, mock_event_dispatcher: Mock
):
    # Arrange
    spec = SystemSpec(preset="vertical", t=0.8)
    config = GapLemmaRunConfig(first=spec, second=spec, generation=0)

    # Act
    result = thickness_service.gap_lemma(config, RUN_ID)

    # Assert
    assert result.summary == {"outcome": "Intersect"}
    data = _written(mock_report_repo, "gaplemma.json")
    assert data["witness"] is not None
    assert data["witness_error"] is None
    assert data["witness_member"] == {"first": True, "second": True}
    event = mock_event_dispatcher.dispatch.call_args_list[0].args[0][0]
    assert isinstance(event, GapLemmaDecided)
    assert event.tau_product == pytest.approx(4.0)


def test_gap_lemma_for_a_set_inside_a_gap(
    thickness_service: ThicknessService, mock_report_repo: Mock
):
    config = GapLemmaRunConfig(
        first=SystemSpec(preset="vertical", t=0.8, alpha=0.1, beta=0.45),
        second=SystemSpec(preset="vertical", t=0.8),
        generation=0,
    )

    result = thickness_service.gap_lemma(config, RUN_ID)

    assert result.summary == {"outcome": "FirstInGapOfSecond"}
    assert _written(mock_report_repo, "gaplemma.json")["witness"] is None


def test_failed_witness_search_is_reported(
    thickness_service: ThicknessService, mock_report_repo: Mock
):
    spec = SystemSpec(preset="vertical", t=0.8)
    config = GapLemmaRunConfig(first=spec, second=spec, generation=0, max_depth=2)

    thickness_service.gap_lemma(config, RUN_ID)

    assert _written(mock_report_repo, "gaplemma.json")["witness_error"].startswith(
        "DepthExceeded"
    )
