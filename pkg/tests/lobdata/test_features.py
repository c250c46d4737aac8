# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.errors import DomainError, EmptySeriesError
from tickcast.lobdata.features import (
    EventSeries,
    base_imbalance,
    base_imbalances,
    compute_returns,
    extract_events,
    mid_price,
)
from tests.fixtures import make_book, snapshot


class TestMidPrice:
    def test_average_of_touch(self):
        s = snapshot(0.0, [1.002, 1.003], [1.000, 0.999])
        assert mid_price(s) == pytest.approx(1.001, abs=1e-15)

    def test_touching_book(self):
        assert mid_price(snapshot(0.0, [1.0, 1.1], [1.0, 0.9])) == 1.0

    def test_matches_recomputation(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            bid = rng.uniform(0.5, 2.0)
            ask = bid + rng.uniform(0.0, 0.01)
            s = snapshot(0.0, [ask, ask + 0.01], [bid, bid - 0.01])
            assert mid_price(s) == (ask + bid) / 2.0


class TestComputeReturns:
    def test_examples(self):
        np.testing.assert_array_equal(compute_returns([1.0, 1.0]), [0.0])
        np.testing.assert_allclose(compute_returns([1.0, 1.001]), [0.001], rtol=1e-12)
        np.testing.assert_array_equal(compute_returns([2.0, 1.0]), [-0.5])

    def test_non_positive_price(self):
        with pytest.raises(DomainError):
            compute_returns([1.0, 0.0])

    def test_log_returns_rebuild_prices(self):
        rng = np.random.default_rng(4)
        prices = 1.3 * np.exp(np.cumsum(1e-4 * rng.standard_normal(2000)))
        rebuilt = np.log(prices[0]) + np.concatenate(([0.0], np.cumsum(np.log1p(compute_returns(prices)))))

        np.testing.assert_allclose(rebuilt, np.log(prices), rtol=0, atol=1e-12)


class TestBaseImbalance:
    def test_symmetric_book(self):
        s = snapshot(0.0, [1.0001, 1.0005], [0.9999, 0.9995])
        value, degenerate = base_imbalance(s, depth=2)
        assert value == pytest.approx(0.0, abs=1e-12)
        assert not degenerate

    def test_one_sided(self):
        s = snapshot(0.0, [1.0001, 1.0001], [0.9999, 0.9995])
        assert base_imbalance(s, depth=2) == (1.0, False)

    def test_direct_formula(self):
        s = snapshot(0.0, [1.0001, 1.0009], [1.0000, 0.9998])
        value, _ = base_imbalance(s, depth=2)
        assert value == pytest.approx(-0.6, abs=1e-9)

    def test_degenerate(self):
        s = snapshot(0.0, [1.0001, 1.0001], [0.9999, 0.9999])
        assert base_imbalance(s, depth=2) == (0.0, True)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(1)
        book = make_book(1.0 + rng.normal(scale=1e-3, size=30), bi=rng.uniform(-1, 1, size=30))
        values, degenerate = base_imbalances(book, depth=8)
        for k in range(len(book)):
            scalar, flag = base_imbalance(book[k], depth=8)
            assert values[k] == scalar
            assert degenerate[k] == flag

    def test_depth_outside_book(self):
        with pytest.raises(AssertionError):
            base_imbalance(snapshot(0.0, [1.0001, 1.0002], [0.9999, 0.9998]), depth=3)


class TestExtractEvents:
    def test_constant_price(self):
        with pytest.raises(EmptySeriesError):
            extract_events(make_book(np.ones(100)))

    def test_too_few_snapshots(self):
        with pytest.raises(EmptySeriesError):
            extract_events(make_book([1.0, 1.1]))

    def test_alternating_prices(self):
        mids = np.where(np.arange(50) % 2 == 0, 1.000, 1.001)
        series = extract_events(make_book(mids))

        # the last record has no forward return
        assert len(series) == 49
        np.testing.assert_array_equal(series.times, np.arange(49.0))
        assert np.all(series.returns != 0)

    def test_repeated_records_dropped(self):
        # the price moves on every fifth record only
        mids = 1.0 + 1e-4 * (np.arange(100) // 5)
        series = extract_events(make_book(mids))

        assert len(series) + 1 == 20
        np.testing.assert_array_equal(series.times, np.arange(0.0, 95.0, 5.0))

    def test_returns_between_retained_events(self):
        mids = [1.0, 1.0, 1.001, 1.001, 1.0005]
        series = extract_events(make_book(mids))

        np.testing.assert_array_equal(series.times, [0.0, 2.0])
        np.testing.assert_allclose(series.returns, [0.001, (1.0005 - 1.001) / 1.001], rtol=1e-12)

    def test_imbalance_carried(self):
        bi = np.array([0.5, -0.25, 0.75, 0.0])
        series = extract_events(make_book([1.0, 1.001, 1.002, 1.003], bi=bi))

        np.testing.assert_allclose(series.base_imbalances, bi[:3], atol=1e-9)


class TestEventSeries:
    def test_zero_return_rejected(self):
        with pytest.raises(ValueError):
            EventSeries(
                times=np.array([0.0, 1.0]),
                mid_prices=np.array([1.0, 1.0]),
                returns=np.array([0.0, 1e-4]),
                base_imbalances=np.zeros(2),
            )

    def test_between_and_last_index(self):
        series = extract_events(make_book(1.0 + 1e-4 * np.arange(10)))
        assert len(series.between(2.0, 5.0)) == 4
        assert series.last_index_at_or_before(4.5) == 4
        assert series.last_index_at_or_before(-1.0) == -1


if __name__ == "__main__":
    pytest.main([__file__])
