# Copyright 2024 The tickcast Authors.

from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from tickcast.lobdata.features import EventSeries

__all__ = [
    "MATCH_MODES",
    "PredictionRecord",
    "AccuracyReport",
    "TradingResult",
    "match_reference_return",
    "compute_accuracy",
    "simulate_trading",
    "event_time_errors",
    "reused_references",
]

MATCH_MODES = ("nearest", "previous", "following")


@dataclass(frozen=True)
class PredictionRecord:
    """One scored prediction: issue time, predicted event and return, matched reference."""

    issue_time: float
    predicted_time: float
    bi: float
    predicted_return: float
    reference_return: float
    reference_time: float

    def __post_init__(self):
        assert self.predicted_time > self.issue_time, (
            f"predicted time {self.predicted_time!r} is not after issue time {self.issue_time!r}"
        )

    @property
    def match_distance(self) -> float:
        return abs(self.reference_time - self.predicted_time)

    @property
    def predicted_sign(self) -> int:
        return int(np.sign(self.predicted_return))

    @property
    def reference_sign(self) -> int:
        return int(np.sign(self.reference_return))

    def to_dict(self) -> Dict[str, float]:
        row = asdict(self)
        row["match_distance"] = self.match_distance
        return row


def match_reference_return(
    t_hat: float,
    events: EventSeries,
    mode: str = "nearest",
) -> Tuple[float, float]:
    """
    Return of the actual event matched to a predicted time.

    Args:
        t_hat (float): predicted event time
        events (EventSeries): actual events
        mode (str): ``nearest`` minimizes ``|t_k - t_hat|`` with ties going to
            the earlier event; ``previous`` takes the last event at or before
            ``t_hat``; ``following`` the first at or after it. Both fall back to
            the closest end of the series.

    Returns:
        Tuple[float, float]: ``(R_ref, reference time)``
    """
    assert mode in MATCH_MODES, f"``mode`` must be one of {list(MATCH_MODES)}, but got {mode}."
    times = events.times
    assert len(times) > 0, "can not match against an empty event series."

    right = int(np.searchsorted(times, t_hat, side="left"))
    if mode == "following":
        idx = min(right, len(times) - 1)
    elif mode == "previous":
        idx = int(np.searchsorted(times, t_hat, side="right")) - 1
        idx = max(idx, 0)
    else:
        if right == 0:
            idx = 0
        elif right == len(times):
            idx = len(times) - 1
        else:
            before, after = right - 1, right
            idx = after if times[after] - t_hat < t_hat - times[before] else before

    return float(events.returns[idx]), float(times[idx])


@dataclass
class AccuracyReport:
    """Confusion counts over sign-definite records; ``accuracy`` is NaN when none are left."""

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    excluded: int = 0

    @property
    def scored(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        if self.scored == 0:
            return float("nan")
        return (self.tp + self.tn) / self.scored

    @property
    def defined(self) -> bool:
        return self.scored > 0

    def to_dict(self) -> Dict[str, float]:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "excluded_zero_sign": self.excluded,
            "accuracy": self.accuracy,
        }


def compute_accuracy(records: Sequence[PredictionRecord]) -> AccuracyReport:
    """
    ``(TP + TN) / (TP + TN + FP + FN)`` with a positive class of ``R_hat > 0``.

    Records whose predicted or reference sign is zero are counted in
    ``excluded`` and left out of the ratio.
    """
    report = AccuracyReport()
    for record in records:
        predicted, actual = record.predicted_sign, record.reference_sign
        if predicted == 0 or actual == 0:
            report.excluded += 1
        elif predicted > 0:
            if actual > 0:
                report.tp += 1
            else:
                report.fp += 1
        else:
            if actual < 0:
                report.tn += 1
            else:
                report.fn += 1
    return report


@dataclass
class TradingResult:
    times: np.ndarray
    increments: np.ndarray
    cumulative: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0


def simulate_trading(records: Sequence[PredictionRecord], stake: float = 10000.0) -> TradingResult:
    """
    Per-prediction trade of a fixed notional, closed at the reference event.

    The increment is ``stake * sign(R_hat) * R_ref``: long on a predicted rise,
    short on a predicted fall. No fees. Zero-sign predictions do not trade.

    Args:
        records (Sequence[PredictionRecord]): records in issue-time order
        stake (float): notional per trade in dollars

    Returns:
        TradingResult: issue times, increments and the cumulative profit
    """
    tradable = [r for r in records if r.predicted_sign != 0]
    times = np.array([r.issue_time for r in tradable], dtype=np.float64)
    assert len(times) < 2 or np.all(np.diff(times) >= 0), "records must be in time order."

    increments = np.array(
        [stake * r.predicted_sign * r.reference_return for r in tradable], dtype=np.float64
    )
    return TradingResult(times=times, increments=increments, cumulative=np.cumsum(increments))


def event_time_errors(
    predictions: Sequence[Tuple[float, float]],
    event_times: np.ndarray,
) -> np.ndarray:
    """
    ``|t_next - t_hat|`` for each ``(issue time, predicted time)`` pair.

    ``t_next`` is the first actual event after the issue time; pairs with no
    such event are skipped.
    """
    event_times = np.asarray(event_times, dtype=np.float64)
    errors: List[float] = []
    for t, t_hat in predictions:
        idx = int(np.searchsorted(event_times, t, side="right"))
        if idx < len(event_times):
            errors.append(abs(float(event_times[idx]) - t_hat))
    return np.asarray(errors, dtype=np.float64)


def reused_references(records: Sequence[PredictionRecord]) -> int:
    """Number of records whose reference event already served an earlier record."""
    seen = set()
    reused = 0
    for record in records:
        if record.reference_time in seen:
            reused += 1
        seen.add(record.reference_time)
    return reused
