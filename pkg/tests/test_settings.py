"""Tests for the global settings and constants."""

import pytest

from newhouse_lab.settings import (
    CERTIFY_DEFAULTS,
    HYPER_DEFAULTS,
    TOLERANCES,
    LabSettings,
)


def test_defaults_without_environment(monkeypatch):
    for name in ("THREADS", "LOG_LEVEL", "OUT_DIR", "LOG_TO_FILE"):
        monkeypatch.delenv(f"NEWHOUSE_LAB_{name}", raising=False)

    settings = LabSettings()

    assert settings.threads == 1
    assert settings.log_level == "INFO"
    assert settings.out_dir == "results"
    assert settings.log_to_file is True


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NEWHOUSE_LAB_THREADS", "4")
    monkeypatch.setenv("NEWHOUSE_LAB_LOG_TO_FILE", "false")

    settings = LabSettings()

    assert settings.threads == 4
    assert settings.log_to_file is False


def test_thread_count_must_be_positive():
    with pytest.raises(ValueError):
        LabSettings(threads=0)


def test_numerical_defaults_are_consistent():
    """The default instance and tolerances used by the commands."""
    assert (CERTIFY_DEFAULTS.t, CERTIFY_DEFAULTS.m) == (0.6, 5)
    assert CERTIFY_DEFAULTS.c_rho > 1.0
    assert 0.0 < HYPER_DEFAULTS.lambda1 < HYPER_DEFAULTS.lambda2 < 1.0
    assert TOLERANCES.sink_dedup < TOLERANCES.sink_detect
