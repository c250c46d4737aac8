# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.lobdata.features import extract_events
from tickcast.synthetic import SyntheticConfig, generate_dataset
from tests.fixtures import synthetic


class TestGenerateDataset:
    def test_events_recover_truth(self):
        book, truth = synthetic(duration=1800.0, seed=3)
        series = extract_events(book, depth=8)

        np.testing.assert_array_equal(series.times, truth.times[:-1])
        np.testing.assert_allclose(series.returns, truth.returns, rtol=1e-6, atol=1e-12)
        np.testing.assert_allclose(series.base_imbalances, truth.bi[:-1], atol=1e-9)

    def test_recorded_span(self):
        book, truth = synthetic(duration=600.0, seed=1)
        assert truth.times[0] >= 1649980800.0
        assert truth.times[-1] <= 1649980800.0 + 600.0
        assert np.all(np.abs(truth.bi) <= 0.95)

    def test_repeated_records_are_dropped(self):
        book, truth = synthetic(duration=1800.0, seed=4, repeat_fraction=0.5)
        series = extract_events(book)

        assert len(book) > 1.5 * len(truth.times)
        np.testing.assert_array_equal(series.times, truth.times[:-1])

    def test_static_return_model(self):
        _, truth = synthetic(duration=600.0, seed=5, return_model="static", gain=-1e-3)
        np.testing.assert_allclose(truth.returns, -1e-3 * truth.bi[:-1])
        assert truth.coe is None

    def test_noise_ratio(self):
        _, truth = synthetic(duration=3600.0, seed=6, noise_ratio=0.5)
        noise = truth.returns - truth.clean_returns
        assert np.std(noise) == pytest.approx(0.5 * np.std(truth.clean_returns), rel=0.1)

    def test_resolution(self):
        _, truth = synthetic(duration=600.0, seed=7, resolution=1.0)
        np.testing.assert_array_equal(truth.times, np.round(truth.times))
        assert np.all(np.diff(truth.times) >= 1.0)

    def test_one_second_preset(self):
        cfg = SyntheticConfig.from_preset("one-second", duration=600.0, mu=2.0)
        assert (cfg.mu, cfg.alpha, cfg.beta, cfg.resolution) == (2.0, 1.0, 2.0, 1.0)

        _, truth = generate_dataset(cfg)
        np.testing.assert_array_equal(truth.times, np.round(truth.times))
        assert SyntheticConfig.from_preset("continuous") == SyntheticConfig()
        with pytest.raises(AssertionError):
            SyntheticConfig.from_preset("hourly")

    def test_seeded(self):
        book_a, _ = synthetic(duration=600.0, seed=8)
        book_b, _ = synthetic(duration=600.0, seed=8)
        book_c, _ = synthetic(duration=600.0, seed=9)

        np.testing.assert_array_equal(book_a.ask_prices, book_b.ask_prices)
        np.testing.assert_array_equal(book_a.timestamps, book_b.timestamps)
        assert len(book_a) != len(book_c) or not np.array_equal(book_a.timestamps, book_c.timestamps)

    def test_invalid_settings(self):
        with pytest.raises(AssertionError):
            SyntheticConfig(return_model="arima")
        with pytest.raises(AssertionError):
            SyntheticConfig(depth=12, level_count=10)
        with pytest.raises(AssertionError):
            generate_dataset(SyntheticConfig(duration=1e-3, mu=1e-3, alpha=0.0))


if __name__ == "__main__":
    pytest.main([__file__])
