import json
import os

import pytest

from cocycleforge.storage.fs import FLOAT_FORMAT, format_cell, save_report, write_csv


class TestFormatCell:
    """Test cases for format_cell function."""

    def test_float_full_precision(self):
        assert format_cell(0.1) == "1.00000000000000006e-01"
        assert float(format_cell(1 / 3)) == 1 / 3

    def test_bools_ints_and_none(self):
        assert format_cell(True) == "true"
        assert format_cell(False) == "false"
        assert format_cell(7) == "7"
        assert format_cell(None) == ""
        assert format_cell("u_lambda") == "u_lambda"

    def test_custom_format(self):
        assert format_cell(0.5, "%.3f") == "0.500"


class TestWriteCsv:
    """Test cases for write_csv function."""

    def test_header_comment_and_rows(self, temp_dir):
        path = os.path.join(temp_dir, "nested", "solve.csv")
        result = write_csv(path, ["lam", "residual", "ok"], [[0.9, 1e-11, True]], "abc123", 7)

        assert result == path
        with open(path) as f:
            lines = f.read().splitlines()
        assert lines[0] == "# config_hash=abc123 seed=7"
        assert lines[1] == "lam,residual,ok"
        assert lines[2] == f"{FLOAT_FORMAT % 0.9},{FLOAT_FORMAT % 1e-11},true"

    def test_floats_survive_round_trip(self, temp_dir):
        path = os.path.join(temp_dir, "values.csv")
        values = [0.1 + 0.2, 1e-300, -2.5e-13]
        write_csv(path, ["value"], [[v] for v in values], "h", 0)
        with open(path) as f:
            parsed = [float(line) for line in f.read().splitlines()[2:]]
        assert parsed == values

    def test_empty_table(self, temp_dir):
        path = os.path.join(temp_dir, "empty.csv")
        write_csv(path, ["a"], [], "h", 1)
        with open(path) as f:
            assert f.read() == "# config_hash=h seed=1\na\n"


class TestSaveReport:
    """Test cases for save_report function."""

    def test_save_report(self, temp_dir):
        path = save_report(os.path.join(temp_dir, "reports"), "summary", {"b": 1, "a": [0.5]})

        assert path == os.path.join(temp_dir, "reports", "summary.json")
        with open(path) as f:
            text = f.read()
        assert json.loads(text) == {"a": [0.5], "b": 1}
        assert text.index('"a"') < text.index('"b"')

    def test_save_report_overwrites(self, temp_dir):
        save_report(temp_dir, "r", {"x": 1})
        path = save_report(temp_dir, "r", {"x": 2})
        with open(path) as f:
            assert json.load(f) == {"x": 2}

    def test_unserializable_payload(self, temp_dir):
        with pytest.raises(TypeError):
            save_report(temp_dir, "bad", {"x": object()})
