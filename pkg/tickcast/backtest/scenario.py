# Copyright 2024 The tickcast Authors.

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from tickcast.backtest.scoring import (
    MATCH_MODES,
    PredictionRecord,
    compute_accuracy,
    event_time_errors,
    match_reference_return,
    reused_references,
    simulate_trading,
)
from tickcast.coe.model import CoeModel, CoeParams
from tickcast.coe.srivc import CoeFitConfig, CoeFitDiagnostics, srivc_fit
from tickcast.errors import ScenarioError
from tickcast.hawkes.estimation import HawkesFitDiagnostics, fit_mle
from tickcast.hawkes.forecasting import FORECAST_METHODS, ForecastConfig, roll_predictions
from tickcast.hawkes.intensity import HawkesParams
from tickcast.lobdata.features import DEFAULT_DEPTH, EventSeries
from tickcast.lobdata.scenarios import ScenarioSettings, ScenarioWindow, validate_scenario
from tickcast.predictors import PredictorKind, build_predictor

logger = logging.getLogger(__name__)

__all__ = [
    "HyperParams",
    "BacktestOptions",
    "BacktestResult",
    "fit_hawkes_stage",
    "fit_coe_stage",
    "run_scenario",
]

HawkesFit = Tuple[HawkesParams, HawkesFitDiagnostics]
CoeFit = Tuple[CoeParams, CoeFitDiagnostics]


@dataclass
class HyperParams:
    """
    Hyperparameter set of one backtest.

    Args:
        hawkes_train_min (float): Hawkes training span in minutes
        coe_train_min (float): COE training span in minutes
        warm_min (float): warm-up span in minutes
        delta_t (float): forecast window in seconds
        sim_min (float): simulation span in minutes
        depth (int): book depth of the base imbalance
    """

    hawkes_train_min: float = 20.0
    coe_train_min: float = 50.0
    warm_min: float = 2.5
    delta_t: float = 5.0
    sim_min: float = 2.0
    depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        for name in ("hawkes_train_min", "coe_train_min", "delta_t", "sim_min"):
            assert getattr(self, name) > 0, f"``{name}`` must be positive."
        assert self.warm_min >= 0, "``warm_min`` must not be negative."
        assert self.depth >= 2, "``depth`` must be at least 2."

    def window(self, t0: float) -> ScenarioWindow:
        return ScenarioWindow(
            t0=t0,
            hawkes_train_min=self.hawkes_train_min,
            coe_train_min=self.coe_train_min,
            sim_min=self.sim_min,
        )

    def to_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)


@dataclass
class BacktestOptions:
    """
    Settings of a backtest that are not tuned.

    Args:
        step (float): issue cadence in seconds
        ma_window (float): moving-average window in seconds
        stake (float): notional per trade in dollars
        match_mode (str): ``nearest``, ``previous`` or ``following``
        forecast_method (str): Hawkes forecast, ``quantile`` or ``draw``
        quantile (float): survival level of the ``quantile`` forecast
        min_offset (float): Hawkes predictions closer than this to the issue
            time are moved out to it, ``0`` for none
        condition_on_observed (bool): Hawkes intensity absorbs observed events
        refit_every_step (bool): refit the Hawkes process at every issue time
        refit_window (Optional[float]): refit window in seconds, the Hawkes
            training span when None
        validate (bool): check the window before running
        coe (CoeFitConfig): SRIVC settings
        settings (ScenarioSettings): event-density limits
    """

    step: float = 1.0
    ma_window: float = 60.0
    stake: float = 10000.0
    match_mode: str = "nearest"
    forecast_method: str = "quantile"
    quantile: float = 0.3
    min_offset: float = 0.0
    condition_on_observed: bool = True
    refit_every_step: bool = False
    refit_window: Optional[float] = None
    validate: bool = True
    coe: CoeFitConfig = field(default_factory=CoeFitConfig)
    settings: ScenarioSettings = field(default_factory=ScenarioSettings)

    def __post_init__(self):
        assert self.step > 0, "``step`` must be positive."
        assert self.stake > 0, "``stake`` must be positive."
        assert self.match_mode in MATCH_MODES, (
            f"``match_mode`` must be one of {list(MATCH_MODES)}, but got {self.match_mode}."
        )
        assert self.forecast_method in FORECAST_METHODS, (
            f"``forecast_method`` must be one of {list(FORECAST_METHODS)}, but got {self.forecast_method}."
        )

    def forecast_config(self, hp: HyperParams, seed: int) -> ForecastConfig:
        return ForecastConfig(
            step=self.step,
            delta_t=hp.delta_t,
            t_warm=hp.warm_min * 60.0,
            rng_seed=seed,
            condition_on_observed=self.condition_on_observed,
            refit_every_step=self.refit_every_step,
            refit_window=self.refit_window or hp.hawkes_train_min * 60.0,
            method=self.forecast_method,
            quantile=self.quantile,
            min_offset=self.min_offset,
        )


@dataclass
class BacktestResult:
    """Outcome of one scenario for one predictor."""

    scenario_id: int
    predictor: str
    t0: float
    seed: int
    status: str = "ok"
    stage: Optional[str] = None
    message: str = ""
    records: List[PredictionRecord] = field(default_factory=list)
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    excluded_zero_sign: int = 0
    reused_references: int = 0
    accuracy: float = float("nan")
    profit_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    cumulative_profit: np.ndarray = field(default_factory=lambda: np.empty(0))
    profit_mid_prices: np.ndarray = field(default_factory=lambda: np.empty(0))
    total_profit: float = 0.0
    mean_abs_time_error: float = float("nan")
    predictions: int = 0
    hawkes: Optional[Dict[str, Any]] = None
    coe: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @classmethod
    def failed(cls, scenario_id: int, predictor: str, t0: float, seed: int, error: ScenarioError):
        logger.warning(f"scenario {scenario_id} ({predictor}) failed: {error}")
        return cls(
            scenario_id=scenario_id,
            predictor=predictor,
            t0=t0,
            seed=seed,
            status="failed",
            stage=error.stage,
            message=str(error),
        )

    def profit_rows(self):
        for t, profit, mid in zip(self.profit_times, self.cumulative_profit, self.profit_mid_prices):
            yield float(t), float(profit), float(mid)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario_id": self.scenario_id,
            "predictor": self.predictor,
            "t0": self.t0,
            "seed": self.seed,
            "status": self.status,
            "stage": self.stage,
            "message": self.message,
            "confusion": {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn},
            "excluded_zero_sign": self.excluded_zero_sign,
            "reused_references": self.reused_references,
            "accuracy": self.accuracy,
            "total_profit": self.total_profit,
            "mean_abs_time_error": self.mean_abs_time_error,
            "predictions": self.predictions,
            "records": [r.to_dict() for r in self.records],
            "hawkes": self.hawkes,
            "coe": self.coe,
        }


def fit_hawkes_stage(series: EventSeries, window: ScenarioWindow) -> HawkesFit:
    """Hawkes fit on the events of ``[t0 - T_train, t0]``."""
    train = series.between(window.hawkes_train_start, window.t0)
    try:
        return fit_mle(train.times, T=window.t0, origin=window.hawkes_train_start)
    except (ValueError, RuntimeError) as e:
        raise ScenarioError("hawkes_fit", str(e)) from e


def fit_coe_stage(series: EventSeries, window: ScenarioWindow, cfg: CoeFitConfig) -> CoeFit:
    """
    SRIVC fit on the COE training span.

    A row's return is only known once the next event has happened, so the
    last event before ``t0`` (whose return is realized after it) is left out.
    """
    lo = int(np.searchsorted(series.times, window.coe_train_start, side="left"))
    hi = series.last_index_at_or_before(window.t0)
    try:
        return srivc_fit(series.times[lo:hi], series.base_imbalances[lo:hi], series.returns[lo:hi], cfg)
    except (ValueError, RuntimeError) as e:
        raise ScenarioError("coe_fit", str(e)) from e


def _coe_predictions(
    series: EventSeries,
    window: ScenarioWindow,
    params: CoeParams,
    predictions: List[Tuple[float, float]],
) -> List[Tuple[float, float, float, float]]:
    """``(issue time, predicted time, BI_k, R_hat)`` with the model run from the COE span start."""
    lo = int(np.searchsorted(series.times, window.coe_train_start, side="left"))
    hi = series.last_index_at_or_before(window.sim_end) + 1
    times = series.times[lo:hi]
    bi = series.base_imbalances[lo:hi]

    model = CoeModel(params)
    _, states = model.simulate(times, bi)

    out = []
    for t, t_hat in predictions:
        k = int(np.searchsorted(times, t, side="right")) - 1
        if k < 0:
            continue
        r_hat = model.predict(states[k], float(times[k]), float(bi[k]), t_hat)
        out.append((t, t_hat, float(bi[k]), r_hat))
    return out


def run_scenario(
    series: EventSeries,
    window: ScenarioWindow,
    predictor: Union[PredictorKind, str],
    hp: Optional[HyperParams] = None,
    seed: int = 0,
    scenario_id: int = 0,
    options: Optional[BacktestOptions] = None,
    hawkes_fit: Optional[HawkesFit] = None,
    coe_fit: Optional[CoeFit] = None,
) -> BacktestResult:
    """
    Run one backtest scenario.

    Stages: window validation, Hawkes fit (Hawkes predictor only), rolling
    next-event forecast over the simulation span, COE fit, return prediction
    at every predicted event, matching, scoring and trading. A failing stage
    gives a ``failed`` result carrying the stage tag; nothing partial is scored.

    Args:
        series (EventSeries): full event series
        window (ScenarioWindow): scenario spans
        predictor (Union[PredictorKind, str]): strategy or its name
        hp (Optional[HyperParams]): hyperparameters, defaults when None
        seed (int): scenario seed
        scenario_id (int): identifier carried into the result
        options (Optional[BacktestOptions]): backtest settings
        hawkes_fit (Optional[HawkesFit]): precomputed Hawkes fit for this window
        coe_fit (Optional[CoeFit]): precomputed COE fit for this window

    Returns:
        BacktestResult: scored result, or a failed one
    """
    hp = hp or HyperParams()
    options = options or BacktestOptions()
    if isinstance(predictor, str):
        predictor = PredictorKind(name=predictor, window=options.ma_window)
    predictor = replace(predictor, forecast=options.forecast_config(hp, seed))

    result = BacktestResult(scenario_id=scenario_id, predictor=predictor.name, t0=window.t0, seed=seed)
    rng = np.random.default_rng(seed)

    try:
        if options.validate:
            report = validate_scenario(series, window, options.settings)
            if not report.passed:
                raise ScenarioError("validate", f"window fails {', '.join(report.failures)}")

        strategy = build_predictor(predictor)
        params = None
        if strategy.needs_hawkes_fit:
            params, diagnostics = hawkes_fit or fit_hawkes_stage(series, window)
            result.hawkes = {**params.to_dict(), **diagnostics.to_dict(), "seed": seed}

        try:
            strategy.prepare(series.times, window.t0, params, rng)
            predictions = roll_predictions(
                strategy.predict, window.t0, window.sim_end, options.step, hp.delta_t
            )
        except (ValueError, RuntimeError) as e:
            raise ScenarioError("forecast", str(e)) from e

        coe_params, coe_diagnostics = coe_fit or fit_coe_stage(series, window, options.coe)
        result.coe = {**coe_params.to_dict(), **coe_diagnostics.to_dict()}

        try:
            scored = _coe_predictions(series, window, coe_params, predictions)
        except (ValueError, RuntimeError) as e:
            raise ScenarioError("predict", str(e)) from e
    except ScenarioError as e:
        return BacktestResult.failed(scenario_id, predictor.name, window.t0, seed, e)

    records = []
    for t, t_hat, bi, r_hat in scored:
        r_ref, t_ref = match_reference_return(t_hat, series, options.match_mode)
        records.append(
            PredictionRecord(
                issue_time=t,
                predicted_time=t_hat,
                bi=bi,
                predicted_return=r_hat,
                reference_return=r_ref,
                reference_time=t_ref,
            )
        )

    accuracy = compute_accuracy(records)
    trading = simulate_trading(records, options.stake)
    errors = event_time_errors(predictions, series.times)

    mid_index = np.searchsorted(series.times, trading.times, side="right") - 1
    result.records = records
    result.tp, result.tn, result.fp, result.fn = accuracy.tp, accuracy.tn, accuracy.fp, accuracy.fn
    result.excluded_zero_sign = accuracy.excluded
    result.accuracy = accuracy.accuracy
    result.reused_references = reused_references(records)
    result.profit_times = trading.times
    result.cumulative_profit = trading.cumulative
    result.profit_mid_prices = series.mid_prices[np.maximum(mid_index, 0)]
    result.total_profit = trading.total
    result.mean_abs_time_error = float(errors.mean()) if len(errors) else float("nan")
    result.predictions = len(predictions)

    logger.info(
        f"scenario {scenario_id} ({predictor.name}) at t0={window.t0}: "
        f"{len(records)} record(s), accuracy {result.accuracy:.4f}, profit {result.total_profit:.2f}"
    )
    return result
