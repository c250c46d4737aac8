# Copyright 2024 The tickcast Authors.

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from tickcast.backtest.scenario import BacktestOptions, HyperParams, fit_hawkes_stage
from tickcast.backtest.scoring import event_time_errors
from tickcast.errors import ScenarioError, TuningError
from tickcast.hawkes.forecasting import roll_predictions
from tickcast.lobdata.features import EventSeries
from tickcast.lobdata.scenarios import validate_scenario
from tickcast.predictors import HawkesPredictor

logger = logging.getLogger(__name__)

__all__ = ["TuningRow", "deduplicate_grid", "tune_hyperparameters"]


@dataclass
class TuningRow:
    index: int
    hp: HyperParams
    mean_abs_error: float
    predictions: int
    status: str = "ok"
    message: str = ""

    def as_row(self):
        return (
            self.index,
            *asdict(self.hp).values(),
            self.mean_abs_error,
            self.predictions,
            self.status,
            self.message,
        )

    @staticmethod
    def header() -> List[str]:
        fields = list(HyperParams.__dataclass_fields__.keys())
        return ["index", *fields, "mean_abs_error", "predictions", "status", "message"]


def deduplicate_grid(grid: Sequence[HyperParams]) -> List[HyperParams]:
    """Drop repeated candidates, keeping the first occurrence."""
    unique, seen = [], set()
    for hp in grid:
        key = tuple(asdict(hp).values())
        if key in seen:
            logger.warning(f"duplicate hyperparameter candidate {asdict(hp)} dropped")
            continue
        seen.add(key)
        unique.append(hp)
    return unique


def tune_hyperparameters(
    series: EventSeries,
    grid: Sequence[HyperParams],
    t0: float,
    seed: int = 0,
    options: Optional[BacktestOptions] = None,
) -> Tuple[HyperParams, List[TuningRow]]:
    """
    Pick the candidate with the smallest mean absolute event-time error.

    Every candidate runs the Hawkes predictor on the validation window anchored
    at ``t0`` with the same seed; the error is ``|t_next - t_hat|`` averaged over
    its saved predictions. Ties go to the earlier candidate.

    Args:
        series (EventSeries): full event series
        grid (Sequence[HyperParams]): candidates, duplicates dropped
        t0 (float): anchor of the validation window
        seed (int): seed shared by all candidates
        options (Optional[BacktestOptions]): backtest settings

    Returns:
        Tuple[HyperParams, List[TuningRow]]: best candidate and one row per candidate

    Raises:
        TuningError: every candidate failed
    """
    assert len(grid) > 0, "the hyperparameter grid must not be empty."
    options = options or BacktestOptions()
    candidates = deduplicate_grid(grid)

    fits: Dict[float, tuple] = {}
    rows = []
    for index, hp in enumerate(tqdm(candidates, desc="tuning")):
        window = hp.window(t0)
        try:
            if options.validate:
                report = validate_scenario(series, window, options.settings)
                if not report.passed:
                    raise ScenarioError("validate", f"window fails {', '.join(report.failures)}")

            if hp.hawkes_train_min not in fits:
                fits[hp.hawkes_train_min] = fit_hawkes_stage(series, window)
            params, _ = fits[hp.hawkes_train_min]

            predictor = HawkesPredictor(options.forecast_config(hp, seed))
            predictor.prepare(series.times, t0, params, np.random.default_rng(seed))
            predictions = roll_predictions(predictor.predict, t0, window.sim_end, options.step, hp.delta_t)
            errors = event_time_errors(predictions, series.times)
            if len(errors) == 0:
                raise ScenarioError("forecast", "no prediction could be scored")
        except (ValueError, RuntimeError) as e:
            rows.append(TuningRow(index, hp, float("inf"), 0, status="failed", message=str(e)))
            continue

        rows.append(TuningRow(index, hp, float(errors.mean()), len(predictions)))

    best = None
    for row in rows:
        if row.status == "ok" and (best is None or row.mean_abs_error < best.mean_abs_error):
            best = row
    if best is None:
        raise TuningError(f"all {len(rows)} hyperparameter candidate(s) failed")

    logger.info(f"best candidate #{best.index}: {asdict(best.hp)}, error {best.mean_abs_error:.6f}")
    return best.hp, rows
