# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.errors import LobFormatError, LobRowError
from tickcast.lobdata.snapshots import level_columns, parse_lob_csv, write_lob_csv
from tests.fixtures import make_book

HEADER = "timestamp," + ",".join(level_columns(2))


def _write(path, rows):
    path.write_text("\n".join([HEADER] + rows) + "\n")
    return str(path)


class TestParseLobCsv:
    def test_rows_in_order(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "101.0,1.0011,5,1.0001,4,1.0021,6,0.9991,3",
                "102.5,1.0012,5,1.0002,4,1.0022,6,0.9992,3",
            ],
        )
        book = parse_lob_csv(path, level_count=2)

        assert len(book) == 3
        np.testing.assert_array_equal(book.timestamps, [100.0, 101.0, 102.5])
        assert book[1].ask_prices[0] == 1.0011
        assert book[2].bid_prices[1] == 0.9992

    def test_duplicate_timestamp_keeps_last(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "100.0,1.0030,5,1.0020,4,1.0040,6,1.0010,3",
            ],
        )
        book = parse_lob_csv(path, level_count=2)

        assert len(book) == 1
        assert book.duplicates_collapsed == 1
        assert book[0].ask_prices[0] == 1.0030

    def test_crossed_book_dropped(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "101.0,0.9990,5,1.0010,4,1.0000,6,1.0000,3",
                "102.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
            ],
        )
        book = parse_lob_csv(path, level_count=2)

        assert len(book) == 2
        assert book.crossed_dropped == 1
        np.testing.assert_array_equal(book.timestamps, [100.0, 102.0])

    def test_missing_column(self, tmp_path):
        path = tmp_path / "lob.csv"
        path.write_text("timestamp,ask_price_1,ask_size_1,bid_price_1\n100.0,1.001,1,1.0\n")

        with pytest.raises(LobFormatError):
            parse_lob_csv(str(path), level_count=1)

    def test_bad_row_reports_line(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "101.0,abc,5,1.0000,4,1.0020,6,0.9990,3",
            ],
        )
        with pytest.raises(LobRowError) as info:
            parse_lob_csv(path, level_count=2)
        assert info.value.line_number == 3

    def test_bad_timestamp_reports_line(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "101.0,1.0011,5,1.0001,4,1.0021,6,0.9991,3",
                "soon,1.0012,5,1.0002,4,1.0022,6,0.9992,3",
                "103.0,1.0013,5,1.0003,4,1.0023,6,0.9993,3",
            ],
        )
        with pytest.raises(LobRowError) as info:
            parse_lob_csv(path, level_count=2)
        assert info.value.line_number == 4
        assert "soon" in str(info.value)

    def test_non_positive_size(self, tmp_path):
        path = _write(tmp_path / "lob.csv", ["100.0,1.0010,0,1.0000,4,1.0020,6,0.9990,3"])

        with pytest.raises(LobRowError) as info:
            parse_lob_csv(path, level_count=2)
        assert info.value.line_number == 2

    def test_iso_timestamps(self, tmp_path):
        path = _write(
            tmp_path / "lob.csv",
            [
                "2022-04-15T00:00:01.5Z,1.0010,5,1.0000,4,1.0020,6,0.9990,3",
                "2022-04-15T00:00:03.25Z,1.0011,5,1.0001,4,1.0021,6,0.9991,3",
            ],
        )
        book = parse_lob_csv(path, level_count=2)

        np.testing.assert_allclose(book.timestamps, [1649980801.5, 1649980803.25])

    def test_extra_levels_ignored(self, tmp_path):
        path = _write(tmp_path / "lob.csv", ["100.0,1.0010,5,1.0000,4,1.0020,6,0.9990,3"])
        book = parse_lob_csv(path, level_count=1)

        assert book.level_count == 1


class TestWriteLobCsv:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        mids = 1.0 + np.cumsum(rng.normal(scale=1e-4, size=50))
        times = 1649980800.0 + np.cumsum(rng.uniform(0.1, 2.0, size=50))
        book = make_book(mids, times, levels=3, depth=3, bi=rng.uniform(-0.9, 0.9, size=50))

        path = str(tmp_path / "book.csv")
        write_lob_csv(path, book)
        parsed = parse_lob_csv(path, level_count=3)

        for name in ("timestamps", "ask_prices", "ask_sizes", "bid_prices", "bid_sizes"):
            np.testing.assert_array_equal(getattr(parsed, name), getattr(book, name))

    def test_snapshot_sequence_accepted(self, tmp_path):
        book = make_book([1.0, 1.001, 1.002], levels=2, depth=2)
        path = str(tmp_path / "book.csv")
        write_lob_csv(path, [book[i] for i in range(len(book))])

        assert len(parse_lob_csv(path, level_count=2)) == 3


if __name__ == "__main__":
    pytest.main([__file__])
