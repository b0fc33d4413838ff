"""CSV contract: column layout, float formatting, integrity checks."""

from __future__ import annotations

import numpy as np
import pytest

from zenodyn import IntegrityError, TimeSeries, format_float


class TestFormatFloat:
    def test_seventeen_significant_digits_round_trip(self):
        for value in (1 / 3, np.pi, 0.1, 1e-300, 123456.789, 2.0 ** -52):
            assert float(format_float(value)) == value

    def test_compact_integers(self):
        assert format_float(0.0) == "0"
        assert format_float(1.0) == "1"
        assert format_float(-2.0) == "-2"


class TestTimeSeries:
    def test_header_preserves_column_order(self):
        series = TimeSeries(
            grid=np.array([0.0, 1.0]),
            columns={"p_b": np.array([0.0, 1.0]), "p_a": np.array([1.0, 0.0])},
        )
        assert series.header == ["t", "p_b", "p_a"]

    def test_csv_uses_newline_endings_and_full_precision(self):
        series = TimeSeries(
            grid=np.array([0.0, 0.5]), columns={"p1": np.array([1.0, 1 / 3])}
        )
        text = series.to_csv()
        assert text == "t,p1\n0,1\n0.5,0.33333333333333331\n"
        assert "\r" not in text

    def test_write_is_byte_identical(self, tmp_path):
        series = TimeSeries(
            grid=np.linspace(0, 1, 7), columns={"p1": np.linspace(1, 0, 7)}
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        series.write_csv(a)
        series.write_csv(b)
        assert a.read_bytes() == b.read_bytes()

    def test_custom_grid_name(self):
        series = TimeSeries(
            grid=np.array([4.0, 16.0]),
            columns={"distance": np.array([0.5, 0.1])},
            grid_name="N",
        )
        assert series.header == ["N", "distance"]


class TestIntegrity:
    def test_grid_must_increase_strictly(self):
        with pytest.raises(IntegrityError):
            TimeSeries(grid=np.array([0.0, 0.0]), columns={"p1": np.array([1.0, 1.0])})
        with pytest.raises(IntegrityError):
            TimeSeries(grid=np.array([1.0, 0.0]), columns={"p1": np.array([1.0, 1.0])})

    def test_nonfinite_values_rejected(self):
        with pytest.raises(IntegrityError):
            TimeSeries(grid=np.array([0.0, 1.0]), columns={"x": np.array([0.0, np.nan])})

    def test_probability_columns_are_bounded(self):
        # Columns named p* carry probabilities and must stay in
        # [-1e-9, 1 + 1e-9]; others are unconstrained.
        with pytest.raises(IntegrityError) as err:
            TimeSeries(grid=np.array([0.0, 1.0]), columns={"p1": np.array([0.5, 1.1])})
        assert "p1" in str(err.value)
        TimeSeries(grid=np.array([0.0, 1.0]), columns={"energy": np.array([0.5, 7.0])})
        TimeSeries(grid=np.array([0.0, 1.0]), columns={"p1": np.array([0.0, 1.0 + 5e-10])})

    def test_column_length_mismatch_rejected(self):
        with pytest.raises(IntegrityError):
            TimeSeries(grid=np.array([0.0, 1.0]), columns={"p1": np.array([1.0])})

    def test_requires_at_least_one_column(self):
        with pytest.raises(IntegrityError):
            TimeSeries(grid=np.array([0.0, 1.0]), columns={})
