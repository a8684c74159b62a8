"""Global fixtures for the test suite."""

from unittest.mock import Mock

import pytest

from newhouse_lab.application.event_dispatcher import EventDispatcher
from newhouse_lab.domain.bc_family import (
    QuadraticPeakFamily,
    SkewMap,
    VerticalSystem,
    make_bc,
    make_user,
)
from newhouse_lab.infrastructure.filesystem_report_repository import (
    FilesystemReportRepository,
)
from newhouse_lab.ports.repository_interfaces import ReportRepositoryInterface

# f(x) = 0.5 - 0.3 x^2 keeps x in [0.2, 0.5]; the only attractor is the fixed
# point (0.4415..., 0) with multipliers f_x = -0.2649... and K_y = 0.4.
SINK_FAMILY = {
    "kind": "user",
    "x_family": {"kind": "quadratic_peak", "p0": 0.5, "p1": 0.0, "a": 0.3},
    "vertical": {"a": 0.4, "b": 0.6},
}

# f(x) = 0.05 - 0.3 x^2 sends the strip edge x = +-0.1 straight back into the strip.
RETURN_FAMILY = {
    "kind": "user",
    "x_family": {"kind": "quadratic_peak", "p0": 0.05, "p1": 0.0, "a": 0.3},
    "vertical": {"a": 0.4, "b": 0.6},
}


@pytest.fixture(scope="session")
def explicit_map() -> SkewMap:
    """The explicit family at the default instance t = 0.6, m = 5."""
    return make_bc(0.6, 5)


@pytest.fixture(scope="session")
def sink_map() -> SkewMap:
    """A user map with a single attracting fixed point."""
    return make_user(
        QuadraticPeakFamily(0.5, 0.0, 0.3), VerticalSystem.from_dict({"a": 0.4, "b": 0.6})
    )


@pytest.fixture(scope="session")
def return_map() -> SkewMap:
    """A user map whose strip edge returns to the strip after one step."""
    return make_user(
        QuadraticPeakFamily(0.05, 0.0, 0.3), VerticalSystem.from_dict({"a": 0.4, "b": 0.6})
    )


@pytest.fixture
def report_repo(tmp_path) -> FilesystemReportRepository:
    """Provides a report repository writing into a temporary directory."""
    return FilesystemReportRepository(str(tmp_path / "out"))


@pytest.fixture
def mock_report_repo() -> Mock:
    """Provides a mock report repository that echoes the file name as path."""
    repo = Mock(spec=ReportRepositoryInterface)
    repo.write_json.side_effect = lambda name, data: f"/out/{name}"
    repo.write_csv.side_effect = lambda name, header, rows: f"/out/{name}"
    repo.write_text.side_effect = lambda name, text: f"/out/{name}"
    return repo


@pytest.fixture
def mock_event_dispatcher() -> Mock:
    """Provides a mock EventDispatcher."""
    return Mock(spec=EventDispatcher)


@pytest.fixture
def sink_family() -> dict:
    """The family config of `sink_map`."""
    return {**SINK_FAMILY, "x_family": dict(SINK_FAMILY["x_family"])}


@pytest.fixture
def return_family() -> dict:
    """The family config of `return_map`."""
    return {**RETURN_FAMILY, "x_family": dict(RETURN_FAMILY["x_family"])}
