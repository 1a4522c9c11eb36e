"""CSV ingestion and series output"""

import numpy as np
import pytest

from backend.exceptions import DataError
from backend.sagarch_model import ReturnSeries
from data.csv_loader import ReturnCsvLoader, ingest_csv, write_series_csv


def _write(tmp_path, text, name="returns.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_return_column_is_used(tmp_path):
    path = _write(tmp_path, "date,return\n2024-01-02,0.5\n2024-01-03,-1.25\n")
    series = ingest_csv(path)
    assert len(series) == 2
    np.testing.assert_array_equal(series.values, [0.5, -1.25])
    assert series.scale_hint == "raw"


def test_single_numeric_column_without_header_name(tmp_path):
    path = _write(tmp_path, "date,r\n2024-01-02,0.1\n2024-01-03,0.2\n2024-01-04,0.3\n")
    loader = ReturnCsvLoader(path)
    assert len(loader.load()) == 3
    assert loader.column == "r"


def test_two_numeric_columns_are_ambiguous(tmp_path):
    path = _write(tmp_path, "a,b\n0.1,0.2\n0.3,0.4\n")
    with pytest.raises(DataError, match="ambiguous"):
        ingest_csv(path)


def test_percent_unit_comment(tmp_path):
    path = _write(tmp_path, "# unit: percent\nreturn\n1.5\n-0.7\n")
    series = ingest_csv(path)
    assert series.scale_hint == "percent"
    # no rescaling
    np.testing.assert_array_equal(series.values, [1.5, -0.7])


def test_unknown_unit(tmp_path):
    path = _write(tmp_path, "# unit: basis_points\nreturn\n1.5\n-0.7\n")
    with pytest.raises(DataError) as info:
        ingest_csv(path)
    assert info.value.lines == [1]


def test_bad_rows_are_reported_with_line_numbers(tmp_path):
    path = _write(tmp_path, "# comment\nreturn\n0.1\nabc\n0.3\n\ninf\n")
    with pytest.raises(DataError) as info:
        ingest_csv(path)
    assert info.value.lines == [4, 7]
    assert "line(s) 4, 7" in str(info.value)


@pytest.mark.parametrize("text", ["", "   \n", "return\n", "return\n0.1\n"])
def test_empty_or_short_files(tmp_path, text):
    with pytest.raises(DataError):
        ingest_csv(_write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        ingest_csv(tmp_path / "absent.csv")


def test_written_series_reads_back(tmp_path):
    series = ReturnSeries(np.array([0.1, -2.5e-7, 3.141592653589793]), scale_hint="percent")
    path, count = write_series_csv(series, tmp_path / "out.csv")
    assert count == 3
    assert path.read_text().splitlines()[:2] == ["# unit: percent", "return"]
    again = ingest_csv(path)
    np.testing.assert_array_equal(again.values, series.values)
    assert again.scale_hint == "percent"
