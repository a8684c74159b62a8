"""Tests for the name-based id constructors."""

import uuid

from newhouse_lab.domain.ids import box_id_for, run_id_for, sink_id_for


def test_run_ids_are_deterministic():
    assert run_id_for('{"t":0.6}') == run_id_for('{"t":0.6}')
    assert run_id_for('{"t":0.6}') != run_id_for('{"t":0.7}')
    assert run_id_for("{}").version == 5


def test_sink_ids_round_to_ten_digits():
    assert sink_id_for(1, 0.44152, 0.0) == sink_id_for(1, 0.44152 + 1e-13, 0.0)
    assert sink_id_for(1, 0.44152, 0.0) != sink_id_for(2, 0.44152, 0.0)


def test_box_ids_depend_on_word_and_side():
    plus = box_id_for(2, (0, 1), "+")

    assert isinstance(plus, uuid.UUID)
    assert plus == box_id_for(2, (0, 1), "+")
    assert plus != box_id_for(2, (0, 1), "-")
    assert plus != box_id_for(2, (1, 0), "+")
