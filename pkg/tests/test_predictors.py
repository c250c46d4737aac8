# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.hawkes.forecasting import ForecastConfig, HawkesForecaster, waiting_time_quantile
from tickcast.hawkes.intensity import HawkesParams, IntensityState
from tickcast.predictors import (
    HawkesPredictor,
    MovingAveragePredictor,
    NaivePredictor,
    OraclePredictor,
    PredictorKind,
    build_predictor,
    hawkes_next,
    ma_next,
    naive_next,
    oracle_next,
)

EVENTS = np.array([10.0, 12.0, 15.0])


class TestOracle:
    def test_next_actual_event(self):
        assert oracle_next(EVENTS, 10.0) == 12.0
        assert oracle_next(EVENTS, 11.0) == 12.0
        assert oracle_next(EVENTS, 0.0) == 10.0

    def test_exhausted(self):
        assert oracle_next(EVENTS, 15.0) is None

    def test_predictor(self):
        predictor = OraclePredictor().prepare(EVENTS, t0=10.0)
        assert predictor.predict(12.5) == 15.0


class TestNaive:
    def test_one_second_ahead(self):
        assert naive_next(3.0) == 4.0
        assert NaivePredictor().prepare(EVENTS, 10.0).predict(11.5) == 12.5


class TestMovingAverage:
    def test_mean_gap(self):
        history = np.arange(0.0, 61.0, 10.0)
        assert ma_next(history, 60.0, W=60.0) == pytest.approx(70.0)

    def test_window_bounds(self):
        history = np.array([0.0, 1.0, 50.0, 52.0, 54.0])
        # the window [50, 60] holds 50, 52 and 54
        assert ma_next(history, 60.0, W=10.0) == pytest.approx(62.0)

    def test_falls_back_to_naive(self):
        assert ma_next(np.array([5.0]), 60.0, W=60.0) == 61.0
        assert ma_next(np.empty(0), 60.0) == 61.0

    def test_ignores_future_events(self):
        history = np.array([40.0, 50.0, 60.0, 61.0, 61.5])
        assert ma_next(history, 60.0, W=30.0) == pytest.approx(70.0)

    def test_predictor_window(self):
        predictor = MovingAveragePredictor(window=30.0).prepare([40.0, 50.0, 60.0], t0=60.0)
        assert predictor.predict(60.0) == pytest.approx(70.0)


class TestHawkes:
    params = HawkesParams(mu=0.5, alpha=0.8, beta=1.2)

    def test_hawkes_next_absorbs_observed(self):
        cfg = ForecastConfig(delta_t=1e9)
        base = IntensityState.baseline(self.params, 0.0)
        observed = np.array([1.0, 2.0, 3.0])

        expected = 3.5 + waiting_time_quantile(base.absorb_many(observed), 3.5, cfg.quantile)
        assert hawkes_next(base, observed, 3.5, cfg, np.random.default_rng(0)) == expected

    def test_hawkes_next_draw(self):
        cfg = ForecastConfig(delta_t=1e9, method="draw")
        base = IntensityState.baseline(self.params, 0.0)
        observed = np.array([1.0, 2.0, 3.0])

        u = np.random.default_rng(0).random()
        expected = -np.log(u) / base.absorb_many(observed).intensity_at(3.5)
        got = hawkes_next(base, observed, 3.5, cfg, np.random.default_rng(0))
        assert got == pytest.approx(3.5 + expected)

    def test_predictor_delegates_to_forecaster(self):
        events = np.sort(np.random.default_rng(1).uniform(0.0, 600.0, size=300))
        cfg = ForecastConfig(t_warm=60.0)

        predictor = HawkesPredictor(cfg).prepare(events, 300.0, self.params, np.random.default_rng(7))
        forecaster = HawkesForecaster(self.params, events, 300.0, cfg, np.random.default_rng(7))
        for t in (300.0, 303.0, 310.0):
            assert predictor.predict(t) == forecaster.predict(t)

    def test_needs_parameters(self):
        with pytest.raises(AssertionError):
            HawkesPredictor().prepare(EVENTS, 10.0)


class TestBuildPredictor:
    @pytest.mark.parametrize(
        "name, cls",
        [
            ("oracle", OraclePredictor),
            ("naive", NaivePredictor),
            ("ma", MovingAveragePredictor),
            ("hawkes", HawkesPredictor),
        ],
    )
    def test_kinds(self, name, cls):
        predictor = build_predictor(PredictorKind(name))
        assert isinstance(predictor, cls)
        assert predictor.name == name
        assert predictor.needs_hawkes_fit == (name == "hawkes")

    def test_window_and_case(self):
        predictor = build_predictor(PredictorKind("MA", window=30.0))
        assert predictor.window == 30.0

    def test_unknown(self):
        with pytest.raises(AssertionError):
            PredictorKind("arima")


if __name__ == "__main__":
    pytest.main([__file__])
