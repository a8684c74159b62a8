import json

from newhouse_lab.presentation import logging as plog


def test_log_without_data_emits_json_with_expected_keys(capsys):
    plog.log("hello world")

    captured = capsys.readouterr()
    assert captured.out == ""
    obj = json.loads(captured.err)
    # required keys
    assert "timestamp" in obj
    assert obj["level"] == "INFO"
    assert obj["category"] == "app"
    assert obj["message"] == "hello world"
    assert "data" not in obj


def test_log_with_data_includes_data_field(capsys):
    payload = {"a": 1}

    plog.log("with data", level="ERROR", category="lifecycle", data=payload)

    obj = json.loads(capsys.readouterr().err)
    assert obj["message"] == "with data"
    assert obj["level"] == "ERROR"
    assert obj["category"] == "lifecycle"
    assert obj["data"] == payload
