# Copyright 2024 The tickcast Authors.

import logging
from concurrent.futures.process import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from tickcast.backtest.scenario import (
    BacktestOptions,
    BacktestResult,
    HyperParams,
    fit_coe_stage,
    fit_hawkes_stage,
    run_scenario,
)
from tickcast.errors import ScenarioError
from tickcast.lobdata.features import EventSeries
from tickcast.lobdata.scenarios import ScenarioWindow, validate_scenario
from tickcast.predictors import PREDICTOR_NAMES, PredictorKind

logger = logging.getLogger(__name__)

__all__ = [
    "BoxStats",
    "boxplot_statistics",
    "scenario_seed",
    "MonteCarloReport",
    "monte_carlo",
]

AGGREGATE_COLUMNS = (
    "scenario_id",
    "t0",
    "predictor",
    "status",
    "stage",
    "accuracy",
    "total_profit",
    "records",
    "mean_abs_time_error",
    "seed",
)


@dataclass(frozen=True)
class BoxStats:
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def as_row(self) -> Tuple[float, float, float, float, float]:
        return self.minimum, self.q1, self.median, self.q3, self.maximum


def boxplot_statistics(values: Sequence[float]) -> BoxStats:
    """Min, quartiles and max of the finite values (all NaN when there are none)."""
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    if len(values) == 0:
        nan = float("nan")
        return BoxStats(nan, nan, nan, nan, nan)
    q = np.quantile(values, [0.0, 0.25, 0.5, 0.75, 1.0])
    return BoxStats(*(float(v) for v in q))


def scenario_seed(base_seed: int, scenario_id: int) -> int:
    """Seed of one scenario, a function of the base seed and the scenario id only."""
    return int(np.random.SeedSequence([base_seed, scenario_id]).generate_state(1)[0])


@dataclass
class MonteCarloReport:
    """Per-scenario results, per-predictor summaries and skipped windows."""

    predictors: List[str]
    results: List[BacktestResult] = field(default_factory=list)
    skipped: List[Dict[str, Any]] = field(default_factory=list)

    def results_for(self, predictor: str) -> List[BacktestResult]:
        return [r for r in self.results if r.predictor == predictor and r.ok]

    def accuracies(self, predictor: str) -> np.ndarray:
        return np.array([r.accuracy for r in self.results_for(predictor)], dtype=np.float64)

    def profits(self, predictor: str) -> np.ndarray:
        return np.array([r.total_profit for r in self.results_for(predictor)], dtype=np.float64)

    def box_rows(self):
        """``(predictor, metric, min, q1, median, q3, max)`` for accuracy and total profit."""
        for name in self.predictors:
            yield (name, "accuracy", *boxplot_statistics(self.accuracies(name)).as_row())
            yield (name, "total_profit", *boxplot_statistics(self.profits(name)).as_row())

    def aggregate_rows(self):
        for r in self.results:
            yield (
                r.scenario_id,
                r.t0,
                r.predictor,
                r.status,
                r.stage or "",
                r.accuracy,
                r.total_profit,
                len(r.records),
                r.mean_abs_time_error,
                r.seed,
            )

    def summary(self) -> Dict[str, Any]:
        return {
            "predictors": {
                name: {
                    "scenarios": len(self.results_for(name)),
                    "accuracy": boxplot_statistics(self.accuracies(name)).__dict__,
                    "total_profit": boxplot_statistics(self.profits(name)).__dict__,
                }
                for name in self.predictors
            },
            "skipped": self.skipped,
        }


def _run_one(task) -> List[BacktestResult]:
    series, window, names, hp, seed, scenario_id, options = task

    hawkes_fit = None
    try:
        if "hawkes" in names:
            hawkes_fit = fit_hawkes_stage(series, window)
        coe_fit = fit_coe_stage(series, window, options.coe)
    except ScenarioError as e:
        return [BacktestResult.failed(scenario_id, name, window.t0, seed, e) for name in names]

    return [
        run_scenario(
            series,
            window,
            PredictorKind(name=name, window=options.ma_window),
            hp,
            seed=seed,
            scenario_id=scenario_id,
            options=options,
            hawkes_fit=hawkes_fit,
            coe_fit=coe_fit,
        )
        for name in names
    ]


def monte_carlo(
    series: EventSeries,
    windows: Sequence[ScenarioWindow],
    predictors: Sequence[str] = PREDICTOR_NAMES,
    hp: Optional[HyperParams] = None,
    base_seed: int = 0,
    options: Optional[BacktestOptions] = None,
    workers: int = 1,
) -> MonteCarloReport:
    """
    Run every predictor on every scenario window.

    Windows that fail validation are skipped and listed. The Hawkes and COE
    fits are made once per scenario and shared by the predictors. The seed of
    scenario ``i`` depends only on ``(base_seed, i)``, so results do not depend
    on evaluation order or on ``workers``.

    Args:
        series (EventSeries): full event series
        windows (Sequence[ScenarioWindow]): scenario windows; the index is the scenario id
        predictors (Sequence[str]): predictor names
        hp (Optional[HyperParams]): hyperparameters
        base_seed (int): base seed
        options (Optional[BacktestOptions]): backtest settings
        workers (int): worker processes; ``1`` runs in-process

    Returns:
        MonteCarloReport: results in scenario order, then predictor order
    """
    hp = hp or HyperParams()
    options = options or BacktestOptions()
    names = [name.lower() for name in predictors]
    for name in names:
        assert name in PREDICTOR_NAMES, f"Predictor must be one of {list(PREDICTOR_NAMES)}, but got {name}."

    report = MonteCarloReport(predictors=names)
    tasks = []
    for scenario_id, window in enumerate(windows):
        if options.validate:
            validity = validate_scenario(series, window, options.settings)
            if not validity.passed:
                report.skipped.append(
                    {"scenario_id": scenario_id, "t0": window.t0, "failures": validity.failures}
                )
                continue
        seed = scenario_seed(base_seed, scenario_id)
        tasks.append((series, window, names, hp, seed, scenario_id, options))

    if report.skipped:
        logger.warning(f"skipped {len(report.skipped)} invalid scenario window(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(tqdm(pool.map(_run_one, tasks), total=len(tasks), desc="scenarios"))
    else:
        batches = [_run_one(task) for task in tqdm(tasks, desc="scenarios")]

    for batch in batches:
        report.results.extend(batch)

    logger.info(
        f"Monte Carlo over {len(tasks)} scenario(s) and {len(names)} predictor(s) finished"
    )
    return report
