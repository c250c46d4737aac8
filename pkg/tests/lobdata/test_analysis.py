# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.errors import InsufficientDataError
from tickcast.lobdata.analysis import daily_ohlc, dataset_summary, decile_correlation
from tickcast.lobdata.features import extract_events
from tests.fixtures import make_book, make_series


class TestDecileCorrelation:
    def test_perfect_anticorrelation(self):
        rng = np.random.default_rng(0)
        bi = rng.uniform(-0.9, 0.9, size=500)
        bi = bi[bi != 0]
        series = make_series(np.arange(len(bi), dtype=np.float64), returns=-bi, bi=bi)

        table = decile_correlation(series)
        assert table.rho == pytest.approx(-1.0, abs=1e-12)
        assert table.counts.sum() == len(bi)
        assert len(list(table.rows())) == 10

    def test_noisy_negative_relation(self):
        rng = np.random.default_rng(1)
        bi = rng.uniform(-1, 1, size=5000)
        returns = -bi + 0.1 * rng.standard_normal(5000)
        series = make_series(np.arange(5000.0), returns=returns, bi=bi)

        assert decile_correlation(series).rho <= -0.9

    def test_independent_relation_is_weak(self):
        rng = np.random.default_rng(2)
        bi = rng.uniform(-1, 1, size=20000)
        returns = rng.standard_normal(20000)
        series = make_series(np.arange(20000.0), returns=returns, bi=bi)

        # decile means of independent data spread by about 1/sqrt(2000)
        table = decile_correlation(series)
        assert np.all(np.abs(table.mean_bi) < 0.1)

    def test_too_few_events(self):
        with pytest.raises(InsufficientDataError):
            decile_correlation(make_series(np.arange(5.0)))

    def test_constant_imbalance(self):
        returns = np.random.default_rng(3).standard_normal(100)
        with pytest.raises(InsufficientDataError):
            decile_correlation(make_series(np.arange(100.0), returns=returns, bi=np.full(100, 0.2)))

    def test_constant_returns(self):
        bi = np.random.default_rng(4).uniform(-1, 1, size=100)
        with pytest.raises(InsufficientDataError):
            decile_correlation(make_series(np.arange(100.0), bi=bi))


class TestDailyOhlc:
    def test_two_days(self):
        start = 1649980800.0
        times = start + np.arange(0.0, 2 * 86400.0, 3600.0)
        mids = 1.0 + 1e-4 * np.arange(len(times))
        ohlc = daily_ohlc(make_book(mids, times))

        assert list(ohlc["day"]) == ["2022-04-15", "2022-04-16"]
        assert ohlc["open"].iloc[0] == pytest.approx(mids[0])
        assert ohlc["close"].iloc[1] == pytest.approx(mids[-1])
        assert ohlc["high"].iloc[0] == pytest.approx(mids[23])


class TestDatasetSummary:
    def test_constant_price(self):
        summary = dataset_summary(make_book(np.ones(100)))

        assert summary["records"] == 100.0
        assert summary["zero_return_fraction"] == 1.0
        assert summary["retained_events"] == 0.0

    def test_gap_statistics(self):
        times = np.array([0.0, 1.0, 3.0, 70.0, 71.0])
        book = make_book(1.0 + 1e-4 * np.arange(5), times)
        summary = dataset_summary(book, extract_events(book))

        assert summary["retained_events"] == 4.0
        assert summary["gap_max"] == 67.0
        assert summary["gap_minute_fraction"] == pytest.approx(1 / 3)


if __name__ == "__main__":
    pytest.main([__file__])
