"""CSV emission and Markdown run reports."""

import pytest

from sel.models import BoundTable, LabConfig, RunConfig, RunRecord
from sel.reporter import Reporter, format_value, table_to_csv


def _table() -> BoundTable:
    table = BoundTable(columns=["n", "rate"])
    table.add_row(10000, 0.123456789012345)
    table.add_row(100000, 1.0 / 3.0)
    return table


def test_format_value_uses_twelve_significant_digits():
    assert format_value(1.0 / 3.0) == "0.333333333333"
    assert format_value(1e8) == "100000000"
    assert format_value(1e-9) == "1e-09"


def test_table_to_csv():
    text = table_to_csv(_table())
    assert text.splitlines()[0] == "n,rate"
    assert text.splitlines()[1] == "10000,0.123456789012"
    assert text.endswith("\n") and "\r" not in text


def test_write_csv_to_file(tmp_path):
    path = Reporter(LabConfig(output_dir=str(tmp_path))).write_csv(_table(), tmp_path / "out" / "t.csv")
    assert path.read_text() == table_to_csv(_table())


def test_write_csv_to_stdout(capsys):
    assert Reporter().write_csv(_table()) is None
    assert capsys.readouterr().out.startswith("n,rate\n")


def test_generate_report(tmp_path):
    record = RunRecord(
        run_id="20260101-000000-abcd1234",
        config=RunConfig(
            subcommand="aep", inputs=["bell.json"], eps={"eps": 0.1}, params={"n": "100"}, seed=3
        ),
        summary={"rows": 1},
        output_path="aep.csv",
    )
    out = Reporter(LabConfig(output_dir=str(tmp_path / ".sel"))).generate(record)
    text = out.read_text()
    assert out.name == "sel-report-20260101-000000-abcd1234.md"
    assert "**Command:** aep" in text
    assert "| eps | 0.1 |" in text
    assert "**Seed:** 3" in text
    assert "**Output:** aep.csv" in text


def test_load_latest_roundtrip(tmp_path):
    reporter = Reporter(LabConfig(output_dir=str(tmp_path / ".sel")))
    record = RunRecord(run_id="r1", config=RunConfig(subcommand="qkd"))
    reporter.generate(record)
    assert "sel run r1" in reporter.load_latest()
    assert "sel run r1" in reporter.load_latest("r1")
    with pytest.raises(FileNotFoundError):
        reporter.load_latest("r2")


def test_load_latest_without_reports(tmp_path):
    with pytest.raises(FileNotFoundError):
        Reporter(LabConfig(output_dir=str(tmp_path))).load_latest()
