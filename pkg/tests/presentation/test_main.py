import json
import runpy
import sys
from pathlib import Path
from unittest.mock import Mock

import pytest
from pytest_mock import MockerFixture

from newhouse_lab.application.dtos import HyperRunConfig, PlotRunConfig, ThicknessRunConfig
from newhouse_lab.infrastructure.json_config_repository import JsonConfigRepository
from newhouse_lab.ports.repository_interfaces import ConfigRepositoryInterface
from newhouse_lab.presentation.main import (
    COMMANDS,
    build_parser,
    canonical_key,
    main,
    resolve_config,
    run,
)
from newhouse_lab.settings import LabSettings


@pytest.fixture
def settings() -> LabSettings:
    """Settings that keep the run log out of the output directory."""
    return LabSettings(log_to_file=False)


def _manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def test_every_command_has_a_subparser():
    parser = build_parser()

    for command in COMMANDS:
        assert parser.parse_args([command]).command == command


def test_thickness_run_writes_reports_and_manifest(tmp_path: Path, settings: LabSettings):
    # Arrange
    out = tmp_path / "out"

    # Act
    code = run(["thickness", "--out", str(out), "--generations", "0", "2"], settings=settings)

    # Assert
    assert code == 0
    manifest = _manifest(out)
    assert manifest["tool"] == "newhouse-lab"
    assert manifest["command"] == "thickness"
    assert manifest["exit_code"] == 0
    assert manifest["reports"] == {"thickness": "thickness.json"}
    assert "out" not in manifest["config"]
    assert manifest["config"]["generations"] == [0, 2]
    assert (out / "thickness.json").is_file()
    assert not (out / "run.log.jsonl").exists()


def test_identical_runs_share_a_run_id(tmp_path: Path, settings: LabSettings):
    argv = ["thickness", "--generations", "1"]

    run([*argv, "--out", str(tmp_path / "a")], settings=settings)
    run([*argv, "--out", str(tmp_path / "b")], settings=settings)

    assert _manifest(tmp_path / "a")["run_id"] == _manifest(tmp_path / "b")["run_id"]
    assert (tmp_path / "a" / "thickness.json").read_bytes() == (
        tmp_path / "b" / "thickness.json"
    ).read_bytes()


def test_inconclusive_certificate_exits_with_two(
    tmp_path: Path, settings: LabSettings, capsys
):
    # Arrange
    argv = ["certify", "--t", "0.3", "--m", "4", "--generation", "10", "--steps", "200"]

    # Act
    code = run([*argv, "--out", str(tmp_path)], settings=settings)

    # Assert
    assert code == 2
    assert _manifest(tmp_path)["exit_code"] == 2
    assert _manifest(tmp_path)["derived"]["m"] == 4
    assert "Certificate inconclusive for t=0.3, m=4" in capsys.readouterr().err


def test_library_errors_exit_with_one(tmp_path: Path, settings: LabSettings, capsys):
    code = run(["certify", "--c-rho", "5", "--out", str(tmp_path)], settings=settings)

    assert code == 1
    assert not (tmp_path / "manifest.json").exists()
    err = capsys.readouterr().err
    assert '"type": "LinkingViolated"' in err
    assert '"middle"' in err


def test_validation_errors_exit_with_one(tmp_path: Path, settings: LabSettings):
    assert run(["gaplemma", "--out", str(tmp_path)], settings=settings) == 1


def test_missing_config_file_exits_with_one(tmp_path: Path, settings: LabSettings):
    code = run(
        ["thickness", "--config", str(tmp_path / "absent.json"), "--out", str(tmp_path)],
        settings=settings,
    )

    assert code == 1


def test_run_log_is_written_when_enabled(tmp_path: Path):
    run(["thickness", "--generations", "0", "--out", str(tmp_path)], settings=LabSettings())

    lines = (tmp_path / "run.log.jsonl").read_text(encoding="utf-8").splitlines()
    messages = [json.loads(line)["message"] for line in lines]
    assert "Domain Event: ThicknessMeasured" in messages
    assert "Domain Event: ReportWritten" in messages


def test_flags_override_the_config_file(tmp_path: Path):
    # Arrange
    path = tmp_path / "run.json"
    path.write_text(
        json.dumps({"generations": [1], "system": {"preset": "vertical", "t": 0.8}}),
        encoding="utf-8",
    )
    args = build_parser().parse_args(
        ["thickness", "--config", str(path), "--generations", "3", "--alpha", "2"]
    )

    # Act
    config = resolve_config("thickness", args, JsonConfigRepository())

    # Assert
    assert isinstance(config, ThicknessRunConfig)
    assert config.generations == [3]
    assert config.system.preset == "vertical"
    assert config.system.t == 0.8
    assert config.system.alpha == 2.0


def test_family_flags_build_an_explicit_family():
    args = build_parser().parse_args(["hyper", "--t", "0.5", "--eps", "0.2"])
    config_repo = Mock(spec=ConfigRepositoryInterface)

    config = resolve_config("hyper", args, config_repo)

    assert isinstance(config, HyperRunConfig)
    assert config.family.kind == "explicit_bc"
    assert config.family.t == 0.5
    assert config.eps == 0.2
    config_repo.load.assert_not_called()


def test_plot_accepts_a_rho_mode():
    args = build_parser().parse_args(["plot", "--rho-mode", "three_halves", "--c-rho", "1.2"])

    config = resolve_config("plot", args, Mock(spec=ConfigRepositoryInterface))

    assert isinstance(config, PlotRunConfig)
    assert config.rho_mode == "three_halves"
    assert config.c_rho == 1.2


def test_system_file_replaces_the_preset(tmp_path: Path):
    # Arrange
    def affine(alpha: float, beta: float) -> dict:
        return {"kind": "affine", "params": {"alpha": alpha, "beta": beta}}

    system = {
        "label": "thirds",
        "branches": [
            {"domain": [0.0, 1.0 / 3.0], "map": affine(3.0, 0.0)},
            {"domain": [2.0 / 3.0, 1.0], "map": affine(3.0, -2.0)},
        ],
    }
    path = tmp_path / "system.json"
    path.write_text(json.dumps(system), encoding="utf-8")
    args = build_parser().parse_args(["thickness", "--system", str(path)])

    # Act
    config = resolve_config("thickness", args, JsonConfigRepository())

    # Assert
    assert config.system.preset is None
    assert config.system.label == "thirds"
    assert len(config.system.branches) == 2


def test_canonical_key_ignores_the_output_directory():
    first = ThicknessRunConfig(out="a")
    second = ThicknessRunConfig(out="b")

    assert canonical_key("thickness", first) == canonical_key("thickness", second)
    assert canonical_key("thickness", first) != canonical_key("sweep", first)


def test_main_function(mocker: MockerFixture) -> None:
    """Test that the console script delegates to run()."""
    mock_run = mocker.patch("newhouse_lab.presentation.main.run", return_value=2)

    assert main() == 2
    mock_run.assert_called_once_with()


def test_main_dunder_guard(mocker: MockerFixture, capsys) -> None:
    """Running the module as a script parses sys.argv."""
    mocker.patch.object(sys, "argv", ["newhouse-lab", "--version"])
    if "newhouse_lab.presentation.main" in sys.modules:
        mocker.patch.dict(sys.modules)
        del sys.modules["newhouse_lab.presentation.main"]

    with pytest.raises(SystemExit) as excinfo:
        runpy.run_module("newhouse_lab.presentation.main", run_name="__main__")

    assert excinfo.value.code == 0
    assert "newhouse-lab 0.1.0" in capsys.readouterr().out
