# Copyright 2024 The tickcast Authors.

import numpy as np
import pytest

from tickcast.backtest.scoring import (
    PredictionRecord,
    compute_accuracy,
    event_time_errors,
    match_reference_return,
    reused_references,
    simulate_trading,
)
from tests.fixtures import make_series


def record(r_hat: float, r_ref: float, t: float = 0.0, t_ref: float = None) -> PredictionRecord:
    return PredictionRecord(
        issue_time=t,
        predicted_time=t + 1.0,
        bi=0.0,
        predicted_return=r_hat,
        reference_return=r_ref,
        reference_time=t + 1.0 if t_ref is None else t_ref,
    )


class TestMatchReferenceReturn:
    events = make_series([10.0, 13.0], returns=[0.001, -0.002])

    def test_nearest(self):
        assert match_reference_return(11.0, self.events) == (0.001, 10.0)
        assert match_reference_return(12.5, self.events) == (-0.002, 13.0)

    def test_tie_goes_to_earlier(self):
        assert match_reference_return(11.5, self.events) == (0.001, 10.0)

    def test_exact(self):
        assert match_reference_return(13.0, self.events) == (-0.002, 13.0)

    def test_outside_the_series(self):
        assert match_reference_return(2.0, self.events)[1] == 10.0
        assert match_reference_return(40.0, self.events)[1] == 13.0

    def test_modes(self):
        assert match_reference_return(12.5, self.events, "previous") == (0.001, 10.0)
        assert match_reference_return(10.5, self.events, "following") == (-0.002, 13.0)
        assert match_reference_return(13.0, self.events, "previous")[1] == 13.0
        assert match_reference_return(50.0, self.events, "following")[1] == 13.0
        with pytest.raises(AssertionError):
            match_reference_return(11.0, self.events, "closest")


class TestComputeAccuracy:
    def test_confusion_example(self):
        records = (
            [record(1.0, 1.0)] * 3
            + [record(-1.0, -1.0)] * 2
            + [record(1.0, -1.0)]
            + [record(-1.0, 1.0)] * 2
        )
        report = compute_accuracy(records)
        assert (report.tp, report.tn, report.fp, report.fn) == (3, 2, 1, 2)
        assert report.accuracy == 0.625

    def test_all_correct(self):
        assert compute_accuracy([record(1e-4, 2e-4), record(-1e-4, -3e-4)]).accuracy == 1.0

    def test_zero_signs_excluded(self):
        report = compute_accuracy([record(0.0, 1.0), record(1.0, 0.0), record(1.0, 1.0)])
        assert report.excluded == 2
        assert report.scored == 1
        assert report.accuracy == 1.0

    def test_undefined(self):
        report = compute_accuracy([])
        assert not report.defined
        assert np.isnan(report.accuracy)

    def test_random_signs(self):
        rng = np.random.default_rng(0)
        n = 20000
        records = [record(a, b) for a, b in zip(rng.choice([-1.0, 1.0], n), rng.choice([-1.0, 1.0], n))]
        assert abs(compute_accuracy(records).accuracy - 0.5) < 3 * 0.5 / np.sqrt(n)

    def test_recomputable_from_counts(self):
        rng = np.random.default_rng(1)
        records = [record(a, b) for a, b in rng.standard_normal((333, 2))]
        report = compute_accuracy(records)
        recomputed = (report.tp + report.tn) / (report.tp + report.tn + report.fp + report.fn)
        assert abs(report.accuracy - recomputed) <= 1e-12


class TestSimulateTrading:
    def test_increments(self):
        records = [
            record(1e-4, 0.001, t=0.0),
            record(1e-4, -0.001, t=1.0),
            record(-1e-4, -0.002, t=2.0),
        ]
        result = simulate_trading(records, stake=10000.0)

        np.testing.assert_allclose(result.increments, [10.0, -10.0, 20.0])
        np.testing.assert_allclose(result.cumulative, [10.0, 0.0, 20.0])
        assert result.total == pytest.approx(20.0)

    def test_zero_sign_does_not_trade(self):
        result = simulate_trading([record(0.0, 0.001), record(1.0, 0.001, t=1.0)])
        assert len(result.increments) == 1
        np.testing.assert_array_equal(result.times, [1.0])

    def test_total_is_sum_and_scales(self):
        rng = np.random.default_rng(2)
        records = [record(a, b * 1e-3, t=float(i)) for i, (a, b) in enumerate(rng.standard_normal((500, 2)))]
        base = simulate_trading(records, stake=10000.0)
        scaled = simulate_trading(records, stake=30000.0)

        assert abs(base.total - base.increments.sum()) <= 1e-9
        np.testing.assert_allclose(scaled.cumulative, 3.0 * base.cumulative, rtol=1e-12, atol=1e-9)

    def test_empty(self):
        assert simulate_trading([]).total == 0.0

    def test_time_order(self):
        with pytest.raises(AssertionError):
            simulate_trading([record(1.0, 1.0, t=5.0), record(1.0, 1.0, t=1.0)])


class TestDiagnostics:
    def test_event_time_errors(self):
        errors = event_time_errors([(0.0, 1.5), (2.0, 3.0), (9.0, 10.0)], np.array([1.0, 4.0]))
        np.testing.assert_allclose(errors, [0.5, 1.0])

    def test_reused_references(self):
        records = [record(1.0, 1.0, t=0.0, t_ref=5.0), record(1.0, 1.0, t=1.0, t_ref=5.0), record(1.0, 1.0, t=2.0)]
        assert reused_references(records) == 1

    def test_predicted_after_issue(self):
        with pytest.raises(AssertionError):
            PredictionRecord(5.0, 5.0, 0.0, 1.0, 1.0, 5.0)


if __name__ == "__main__":
    pytest.main([__file__])
