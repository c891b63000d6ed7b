"""Tests for Dataset, CSV ingestion, and deterministic CSV output."""

import numpy as np
import pytest

from quantcord import Dataset, IngestionError, InvalidArgumentError, read_csv, write_csv


class TestDataset:

    def test_columns_coerced_to_float(self):
        d = Dataset(columns={"a": [1, 2, 3]})
        assert d.column("a").dtype == np.float64
        assert d.n == 3
        assert d.names == ("a",)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError, match="length"):
            Dataset(columns={"a": [1.0, 2.0], "b": [1.0]})

    def test_needs_a_column(self):
        with pytest.raises(InvalidArgumentError, match="at least one column"):
            Dataset(columns={})

    def test_unknown_column_lists_available(self):
        d = Dataset(columns={"a": [1.0, 2.0]})
        with pytest.raises(InvalidArgumentError, match="available"):
            d.column("b")

    def test_contains(self):
        d = Dataset(columns={"a": [1.0, 2.0]})
        assert "a" in d
        assert "b" not in d

    def test_take_keeps_rows_paired(self):
        d = Dataset(columns={"y1": [1.0, 2.0, 3.0], "y2": [10.0, 20.0, 30.0]})
        sub = d.take([2, 0, 2])
        np.testing.assert_array_equal(sub.column("y1"), [3.0, 1.0, 3.0])
        np.testing.assert_array_equal(sub.column("y2"), [30.0, 10.0, 30.0])

    def test_take_rows_are_copies_of_originals(self):
        rng = np.random.default_rng(1)
        d = Dataset(columns={"a": rng.standard_normal(20), "b": rng.standard_normal(20)})
        original_rows = {
            (round(d.column("a")[i], 12), round(d.column("b")[i], 12))
            for i in range(20)
        }
        sub = d.take(rng.integers(0, 20, 20))
        for i in range(20):
            row = (round(sub.column("a")[i], 12), round(sub.column("b")[i], 12))
            assert row in original_rows


class TestReadCsv:

    def _write(self, tmp_path, text, name="data.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    def test_clean_three_rows(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1.5,2.5\n-0.5,0.25\n3,4\n")
        data, report = read_csv(p)
        assert data.n == 3
        assert report.n_dropped == 0
        np.testing.assert_array_equal(data.column("y1"), [1.5, -0.5, 3.0])
        assert data.source == str(p)

    def test_missing_cell_drops_row_with_report(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1,2\n,3\n4,5\n")
        data, report = read_csv(p)
        assert data.n == 2
        assert report.dropped_rows == (2,)
        assert report.n_kept == 2
        np.testing.assert_array_equal(data.column("y1"), [1.0, 4.0])

    def test_na_tokens_count_as_missing(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1,NA\nnan,2\n3,4\n")
        data, report = read_csv(p)
        assert report.dropped_rows == (1, 2)
        assert data.n == 1

    def test_unused_column_with_missing_values_is_ignored(self, tmp_path):
        p = self._write(tmp_path, "y1,y2,extra\n1,2,\n3,4,x\n")
        data, report = read_csv(p, columns=["y1", "y2"])
        assert data.n == 2
        assert report.n_dropped == 0
        assert "extra" not in data

    def test_unparseable_cell_names_coordinates(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1,2\n3,abc\n")
        with pytest.raises(IngestionError, match=r"'abc' at data row 2, column 'y2'"):
            read_csv(p)

    def test_missing_column_error(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1,2\n")
        with pytest.raises(IngestionError, match="missing columns \\['y3'\\]"):
            read_csv(p, columns=["y1", "y3"])

    def test_empty_file(self, tmp_path):
        p = self._write(tmp_path, "")
        with pytest.raises(IngestionError, match="empty"):
            read_csv(p)

    def test_header_only(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n")
        with pytest.raises(IngestionError, match="no usable data rows"):
            read_csv(p)

    def test_binary_column_validated(self, tmp_path):
        p = self._write(tmp_path, "y,g\n1,0\n2,1\n3,2\n")
        with pytest.raises(IngestionError, match="binary column 'g' contains 2.0"):
            read_csv(p, binary=["g"])

    def test_binary_error_names_row(self, tmp_path):
        p = self._write(tmp_path, "y,g\n1,0\n2,2\n3,1\n")
        with pytest.raises(IngestionError, match="data row 2"):
            read_csv(p, binary=["g"])

    def test_binary_ok(self, tmp_path):
        p = self._write(tmp_path, "y,g\n1,0\n2,1\n3,1\n")
        data, _ = read_csv(p, binary=["g"])
        np.testing.assert_array_equal(data.column("g"), [0.0, 1.0, 1.0])

    def test_blank_lines_skipped(self, tmp_path):
        p = self._write(tmp_path, "y1,y2\n1,2\n\n3,4\n")
        data, report = read_csv(p)
        assert data.n == 2
        assert report.n_dropped == 0

    def test_whitespace_tolerated(self, tmp_path):
        p = self._write(tmp_path, " y1 , y2 \n 1.5 , 2.5 \n")
        data, _ = read_csv(p)
        np.testing.assert_array_equal(data.column("y1"), [1.5])


class TestWriteCsv:

    def test_round_trip_full_precision(self, tmp_path):
        rng = np.random.default_rng(7)
        cols = {"y1": rng.standard_normal(50), "y2": rng.standard_normal(50)}
        p = tmp_path / "out.csv"
        write_csv(p, cols)
        data, _ = read_csv(p)
        np.testing.assert_array_equal(data.column("y1"), cols["y1"])
        np.testing.assert_array_equal(data.column("y2"), cols["y2"])

    def test_byte_identical_reruns(self, tmp_path):
        rng = np.random.default_rng(8)
        cols = {"a": rng.standard_normal(20)}
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, cols)
        write_csv(p2, cols)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_order_is_column_order(self, tmp_path):
        p = tmp_path / "o.csv"
        write_csv(p, {"b": [1.0], "a": [2.0]})
        assert p.read_text().splitlines()[0] == "b,a"
