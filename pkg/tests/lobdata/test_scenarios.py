# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.lobdata.scenarios import (
    ScenarioSettings,
    ScenarioWindow,
    mean_max_gap,
    sample_scenario_windows,
    validate_scenario,
)
from tests.fixtures import make_series

T0 = 3100.0


def _window(t0: float = T0) -> ScenarioWindow:
    return ScenarioWindow(t0=t0, hawkes_train_min=20, coe_train_min=50, sim_min=2)


class TestValidateScenario:
    def test_regular_events_pass(self):
        series = make_series(np.arange(0.0, 3600.0))
        report = validate_scenario(series, _window())

        assert report.passed, report.failures
        assert report.details["min_gap"] == 1.0
        assert report.details["mean_max_gap"] == 1.0

    def test_half_second_gap_fails(self):
        times = np.sort(np.append(np.arange(0.0, 3600.0), T0 + 10.5))
        report = validate_scenario(make_series(times), _window())

        assert not report.passed
        assert report.failures == ["min_gap"]

    def test_hole_in_simulation_span(self):
        times = np.arange(0.0, 3600.0)
        times = times[(times <= T0 + 40) | (times >= T0 + 70)]
        report = validate_scenario(make_series(times), _window())

        assert "mean_max_gap" in report.failures
        assert report.details["mean_max_gap"] == pytest.approx((20.0 + 10.0) / 2)

    def test_window_outside_data(self):
        series = make_series(np.arange(0.0, 3600.0))
        report = validate_scenario(series, _window(t0=1000.0))

        assert "spans_within_data" in report.failures

    def test_limits_are_configurable(self):
        times = np.sort(np.append(np.arange(0.0, 3600.0), T0 + 10.5))
        settings = ScenarioSettings(min_gap=0.25)

        assert validate_scenario(make_series(times), _window(), settings).passed


class TestMeanMaxGap:
    def test_empty_stretch_counts(self):
        times = np.array([0.0, 1.0, 2.0])
        assert mean_max_gap(times, 0.0, 60.0, 60.0) == 58.0


class TestSampleScenarioWindows:
    def test_earliest_without_rng(self):
        series = make_series(np.arange(0.0, 4000.0))
        windows = sample_scenario_windows(series, 20, 50, 2, count=3)

        assert [w.t0 for w in windows] == [3000.0, 3120.0, 3240.0]

    def test_random_draw_is_sorted_and_seeded(self):
        series = make_series(np.arange(0.0, 6000.0))
        first = sample_scenario_windows(series, 20, 50, 2, 5, rng=np.random.default_rng(1))
        again = sample_scenario_windows(series, 20, 50, 2, 5, rng=np.random.default_rng(1))

        assert [w.t0 for w in first] == [w.t0 for w in again]
        assert all(b.t0 - a.t0 >= 120.0 for a, b in zip(first, first[1:]))

    def test_too_short(self):
        series = make_series(np.arange(0.0, 600.0))
        assert sample_scenario_windows(series, 20, 50, 2, 1) == []


if __name__ == "__main__":
    pytest.main([__file__])
