# Copyright 2024 The tickcast Authors.

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from tickcast.lobdata.features import EventSeries

logger = logging.getLogger(__name__)

__all__ = [
    "ScenarioSettings",
    "ScenarioWindow",
    "ValidityReport",
    "validate_scenario",
    "mean_max_gap",
    "sample_scenario_windows",
]


@dataclass
class ScenarioSettings:
    """
    Event-density limits a simulation span must meet.

    Args:
        min_gap (float): minimum inter-event distance in seconds
        max_mean_max_gap (float): upper bound on the mean, over consecutive
            ``gap_window``-second windows, of each window's largest gap
        gap_window (float): window length in seconds for the mean-max statistic
    """

    min_gap: float = 1.0
    max_mean_max_gap: float = 2.2
    gap_window: float = 60.0

    def __post_init__(self):
        assert self.gap_window > 0, "``gap_window`` must be positive."


@dataclass(frozen=True)
class ScenarioWindow:
    """
    Training and simulation spans anchored at ``t0``.

    All spans end (training) or start (simulation) at ``t0``; lengths are in minutes.
    """

    t0: float
    hawkes_train_min: float
    coe_train_min: float
    sim_min: float

    @property
    def hawkes_train_start(self) -> float:
        return self.t0 - self.hawkes_train_min * 60.0

    @property
    def coe_train_start(self) -> float:
        return self.t0 - self.coe_train_min * 60.0

    @property
    def sim_end(self) -> float:
        return self.t0 + self.sim_min * 60.0

    @property
    def earliest(self) -> float:
        return min(self.hawkes_train_start, self.coe_train_start)


@dataclass
class ValidityReport:
    """Pass/fail per constraint plus the measured statistics."""

    checks: Dict[str, bool] = field(default_factory=dict)
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


def mean_max_gap(times: np.ndarray, t_start: float, t_end: float, gap_window: float) -> float:
    """
    Mean over consecutive windows of the largest gap between events.

    Gaps are measured on the span boundaries too, so an empty stretch at the
    start or end of the span counts as a gap.
    """
    edges = np.arange(t_start, t_end, gap_window)
    maxima = []
    for lo in edges:
        hi = min(lo + gap_window, t_end)
        inside = times[(times >= lo) & (times <= hi)]
        points = np.concatenate(([lo], inside, [hi]))
        maxima.append(float(np.max(np.diff(points))))
    return float(np.mean(maxima)) if maxima else float("inf")


def validate_scenario(
    series: EventSeries,
    w: ScenarioWindow,
    settings: Optional[ScenarioSettings] = None,
) -> ValidityReport:
    """
    Check a scenario window against the event-density settings.

    Args:
        series (EventSeries): full event series
        w (ScenarioWindow): window to check
        settings (Optional[ScenarioSettings]): limits, defaults when None

    Returns:
        ValidityReport: one entry per constraint; failures are entries, never exceptions
    """
    settings = settings or ScenarioSettings()
    report = ValidityReport()

    within = len(series) > 0 and series.start <= w.earliest and w.sim_end <= series.end
    report.checks["spans_within_data"] = bool(within)

    spans = {
        "hawkes_train": (w.hawkes_train_start, w.t0),
        "coe_train": (w.coe_train_start, w.t0),
        "sim": (w.t0, w.sim_end),
    }
    for name, (lo, hi) in spans.items():
        count = len(series.between(lo, hi)) if len(series) > 0 else 0
        report.details[f"{name}_events"] = float(count)
        report.checks[f"data_in_{name}"] = count > 0

    sim = series.between(w.t0, w.sim_end) if len(series) > 0 else series
    gaps = np.diff(sim.times)
    smallest = float(gaps.min()) if len(gaps) > 0 else float("inf")
    report.details["min_gap"] = smallest
    report.checks["min_gap"] = smallest >= settings.min_gap

    mm = mean_max_gap(sim.times, w.t0, w.sim_end, settings.gap_window)
    report.details["mean_max_gap"] = mm
    report.checks["mean_max_gap"] = mm <= settings.max_mean_max_gap

    report.checks["non_zero_returns"] = bool(len(sim) > 0 and np.all(sim.returns != 0))
    return report


def sample_scenario_windows(
    series: EventSeries,
    hawkes_train_min: float,
    coe_train_min: float,
    sim_min: float,
    count: int,
    settings: Optional[ScenarioSettings] = None,
    rng: Optional[np.random.Generator] = None,
) -> List[ScenarioWindow]:
    """
    Draw non-overlapping simulation windows that pass validation.

    Candidate anchors sit on a ``sim_min`` grid starting at the first time both
    training spans fit inside the data; ``count`` of the valid candidates are
    drawn uniformly without replacement and returned in time order. With no
    generator the earliest valid candidates are returned.
    """
    assert count >= 1, "``count`` must be positive."
    settings = settings or ScenarioSettings()

    first = series.start + max(hawkes_train_min, coe_train_min) * 60.0
    last = series.end - sim_min * 60.0
    if last < first:
        return []

    anchors = np.arange(first, last + 1e-9, sim_min * 60.0)
    valid = []
    for t0 in anchors:
        w = ScenarioWindow(float(t0), hawkes_train_min, coe_train_min, sim_min)
        if validate_scenario(series, w, settings).passed:
            valid.append(w)

    logger.info(f"{len(valid)} of {len(anchors)} candidate window(s) pass validation")
    if len(valid) <= count:
        return valid

    if rng is None:
        return valid[:count]

    picked = np.sort(rng.choice(len(valid), size=count, replace=False))
    return [valid[i] for i in picked]
