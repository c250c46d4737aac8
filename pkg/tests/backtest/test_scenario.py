# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.backtest.scenario import BacktestOptions, HyperParams, fit_coe_stage, run_scenario
from tickcast.errors import ScenarioError
from tickcast.lobdata.features import extract_events
from tickcast.lobdata.scenarios import ScenarioWindow, sample_scenario_windows
from tickcast.predictors import PREDICTOR_NAMES
from tests.fixtures import RELAXED, one_second, synthetic

HP = HyperParams(sim_min=10.0)
OPTIONS = BacktestOptions(settings=RELAXED)


@pytest.fixture(scope="module")
def series():
    book, _ = synthetic(duration=2 * 3600.0, seed=11)
    return extract_events(book)


@pytest.fixture(scope="module")
def window(series):
    return HP.window(series.start + 3600.0)


class TestRunScenario:
    def test_oracle_recovers_signs(self, series, window):
        result = run_scenario(series, window, "oracle", HP, seed=1, options=OPTIONS)

        assert result.ok
        assert result.accuracy >= 0.95
        assert len(result.records) == result.predictions
        for r in result.records:
            assert r.match_distance == 0.0
            k = int(np.searchsorted(series.times, r.reference_time))
            assert r.reference_return == series.returns[k]

    @pytest.mark.parametrize("name", ["hawkes", "naive", "ma"])
    def test_not_better_than_oracle(self, series, window, name):
        oracle = run_scenario(series, window, "oracle", HP, seed=1, options=OPTIONS)
        other = run_scenario(series, window, name, HP, seed=1, options=OPTIONS)
        assert other.ok
        assert other.accuracy <= oracle.accuracy
        assert other.total_profit <= oracle.total_profit

    def test_one_prediction_per_window(self, series, window):
        result = run_scenario(series, window, "naive", HP, seed=1, options=OPTIONS)
        # naive always predicts, at the first issue time of each window
        assert result.predictions == int(HP.sim_min * 60.0 / HP.delta_t)
        issue = np.array([r.issue_time for r in result.records])
        np.testing.assert_allclose(np.diff(issue), HP.delta_t, atol=1e-6)

    def test_hawkes_is_deterministic(self, series, window):
        first = run_scenario(series, window, "hawkes", HP, seed=5, options=OPTIONS)
        second = run_scenario(series, window, "hawkes", HP, seed=5, options=OPTIONS)

        assert first.ok
        assert first.hawkes["seed"] == 5
        assert [r.to_dict() for r in first.records] == [r.to_dict() for r in second.records]
        assert first.total_profit == second.total_profit
        for r in first.records:
            assert r.predicted_time > r.issue_time
            assert r.predicted_time <= r.issue_time + HP.delta_t

    def test_profit_is_sum_of_increments(self, series, window):
        result = run_scenario(series, window, "ma", HP, seed=1, options=OPTIONS)
        increments = [OPTIONS.stake * r.predicted_sign * r.reference_return for r in result.records]
        assert abs(result.total_profit - sum(increments)) <= 1e-9
        assert len(result.profit_mid_prices) == len(result.cumulative_profit)

    def test_accuracy_matches_counts(self, series, window):
        result = run_scenario(series, window, "ma", HP, seed=1, options=OPTIONS)
        counts = result.tp + result.tn + result.fp + result.fn
        assert abs(result.accuracy - (result.tp + result.tn) / counts) <= 1e-12


class TestFailures:
    def test_window_outside_data(self, series):
        window = HP.window(series.end - 60.0)
        result = run_scenario(series, window, "oracle", HP, seed=1, options=OPTIONS)

        assert result.status == "failed"
        assert result.stage == "validate"
        assert result.records == []
        assert "spans_within_data" in result.message

    def test_short_coe_span(self, series, window):
        short = ScenarioWindow(window.t0, hawkes_train_min=20.0, coe_train_min=0.1, sim_min=10.0)
        result = run_scenario(series, short, "naive", HP, seed=1, options=OPTIONS)

        assert result.stage == "coe_fit"
        with pytest.raises(ScenarioError):
            fit_coe_stage(series, short, OPTIONS.coe)

    def test_default_settings_reject_dense_synthetic_events(self, series, window):
        result = run_scenario(series, window, "oracle", HP, seed=1)
        assert result.stage == "validate"


class TestDefaultSettings:
    @pytest.fixture(scope="class")
    def grid_series(self):
        book, _ = one_second(duration=2 * 3600.0, seed=7)
        return extract_events(book)

    @pytest.fixture(scope="class")
    def grid_window(self, grid_series):
        windows = sample_scenario_windows(grid_series, 20.0, 50.0, 2.0, 1)
        assert windows
        return windows[0]

    @pytest.mark.parametrize("name", PREDICTOR_NAMES)
    def test_runs_without_relaxed_limits(self, grid_series, grid_window, name):
        result = run_scenario(grid_series, grid_window, name, HyperParams(), seed=3)

        assert result.ok, result.message
        assert result.predictions > 0
        for r in result.records:
            assert r.issue_time < r.predicted_time <= r.issue_time + HyperParams().delta_t

    def test_oracle_leads(self, grid_series, grid_window):
        oracle = run_scenario(grid_series, grid_window, "oracle", HyperParams(), seed=3)
        for name in ("hawkes", "naive", "ma"):
            other = run_scenario(grid_series, grid_window, name, HyperParams(), seed=3)
            assert other.accuracy <= oracle.accuracy


if __name__ == "__main__":
    pytest.main([__file__])
