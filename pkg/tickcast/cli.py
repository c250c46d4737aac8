# Copyright 2024 The tickcast Authors.
"""
Command-line front end.

Every command reads its settings from ``--config`` (or ``$TICKCAST_CONFIG``),
lets command-line flags override them and writes its files under ``--out``.

Exit codes:
    0: success
    1: usage error (bad flags, bad config, empty grid)
    2: data or window validation error
    3: fit or convergence error
"""

import argparse
import logging
import os
import sys
from dataclasses import asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple

import dacite
import numpy as np
import pandas as pd

from tickcast.__version__ import version as __version__
from tickcast.backtest.montecarlo import AGGREGATE_COLUMNS, monte_carlo
from tickcast.backtest.scenario import HyperParams, fit_hawkes_stage, run_scenario
from tickcast.backtest.tuning import TuningRow, tune_hyperparameters
from tickcast.config import OUTPUT_FORMATS, RunConfig, load_config
from tickcast.errors import (
    DomainError,
    EmptySeriesError,
    HistoryOrderError,
    InsufficientDataError,
    LobFormatError,
    LobRowError,
    ScenarioError,
    SingularSystemError,
    TuningError,
    UnstableModelError,
)
from tickcast.hawkes.forecasting import rolling_forecast
from tickcast.hawkes.intensity import intensity_path
from tickcast.hawkes.likelihood import time_rescaling_test
from tickcast.io_utils import PathUtils, write_csv_rows, write_json
from tickcast.lobdata.analysis import daily_ohlc, dataset_summary, decile_correlation
from tickcast.lobdata.features import EventSeries, extract_events
from tickcast.lobdata.scenarios import ScenarioWindow, sample_scenario_windows
from tickcast.lobdata.snapshots import LobBook, parse_lob_csv, write_lob_csv
from tickcast.predictors import PREDICTOR_NAMES, oracle_next
from tickcast.synthetic import PRESETS, RETURN_MODELS, SyntheticConfig, generate_dataset

logger = logging.getLogger(__name__)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_FIT = 3

DATA_ERRORS = (
    FileNotFoundError,
    LobFormatError,
    LobRowError,
    DomainError,
    EmptySeriesError,
    InsufficientDataError,
    HistoryOrderError,
)
FIT_ERRORS = (UnstableModelError, SingularSystemError, TuningError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="flat key = value config file")
    common.add_argument("--data", default=None, help="LOB snapshot CSV")
    common.add_argument("--level-count", type=int, default=None, help="book levels in the CSV")
    common.add_argument("--predictor", choices=PREDICTOR_NAMES, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--t0", type=float, default=None, help="scenario anchor (epoch seconds)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None, help="summary file format")
    common.add_argument("--log-level", default="INFO", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="tickcast", description="LOB next-tick return-sign forecasting")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("ingest", parents=[common], help="parse a LOB CSV and extract events")
    sub.add_parser("analyze", parents=[common], help="decile correlation, daily OHLC and gap statistics")
    sub.add_parser("fit-hawkes", parents=[common], help="fit the Hawkes process before t0")
    sub.add_parser("forecast", parents=[common], help="rolling Hawkes next-event forecast after t0")
    sub.add_parser("backtest", parents=[common], help="one scenario for one predictor")

    mc = sub.add_parser("montecarlo", parents=[common], help="all predictors over many scenarios")
    mc.add_argument("--scenarios", type=int, default=None)
    mc.add_argument("--workers", type=int, default=None)

    tune = sub.add_parser("tune", parents=[common], help="hyperparameter grid search")
    tune.add_argument("--grid", required=True, help="CSV with one hyperparameter candidate per row")

    synth = sub.add_parser("synth", parents=[common], help="generate a synthetic LOB dataset")
    synth.add_argument("--preset", choices=list(PRESETS), default="continuous", help="base settings")
    synth.add_argument("--duration", type=float, default=None, help="seconds")
    synth.add_argument("--start", type=float, default=None)
    synth.add_argument("--mu", type=float, default=None)
    synth.add_argument("--alpha", type=float, default=None)
    synth.add_argument("--beta", type=float, default=None)
    synth.add_argument("--noise-ratio", type=float, default=None)
    synth.add_argument("--bi-persistence", type=float, default=None)
    synth.add_argument("--return-model", choices=RETURN_MODELS, default=None)
    synth.add_argument("--gain", type=float, default=None)
    synth.add_argument("--repeat-fraction", type=float, default=None)
    synth.add_argument("--resolution", type=float, default=None)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("data", "level_count", "predictor", "seed", "t0", "out", "format", "scenarios", "workers")
    return {key: getattr(args, key, None) for key in keys}


def _flatten(payload: Dict[str, Any], prefix: str = "") -> List[Tuple[str, Any]]:
    rows = []
    for key in sorted(payload):
        value = payload[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, f"{name}."))
        elif isinstance(value, (list, tuple, np.ndarray)):
            # sequences go to their own CSV files
            continue
        else:
            rows.append((name, value))
    return rows


def _write_summary(cfg: RunConfig, name: str, payload: Dict[str, Any]) -> str:
    path = PathUtils.output_path(cfg.out, f"{name}.{cfg.format}")
    if cfg.format == "json":
        write_json(path, payload)
    else:
        write_csv_rows(path, ["key", "value"], _flatten(payload))
    return path


def _load_book(cfg: RunConfig) -> LobBook:
    if cfg.data is None:
        raise UsageError("no dataset given (--data or ``data`` in the config)")
    if not os.path.isfile(cfg.data):
        raise FileNotFoundError(f"dataset not found: {cfg.data}")
    return parse_lob_csv(cfg.data, cfg.level_count)


def _load_series(cfg: RunConfig) -> EventSeries:
    return extract_events(_load_book(cfg), cfg.hyperparams.depth)


def _select_window(cfg: RunConfig, series: EventSeries, hp: Optional[HyperParams] = None) -> ScenarioWindow:
    hp = hp or cfg.hyperparams
    if cfg.t0 is not None:
        return hp.window(cfg.t0)

    windows = sample_scenario_windows(
        series, hp.hawkes_train_min, hp.coe_train_min, hp.sim_min, 1, cfg.settings
    )
    if not windows:
        raise InsufficientDataError("no scenario window in the data passes validation")
    logger.info(f"auto-selected t0 = {windows[0].t0}")
    return windows[0]


def cmd_ingest(cfg: RunConfig, args: argparse.Namespace) -> int:
    book = _load_book(cfg)
    series = extract_events(book, cfg.hyperparams.depth)

    write_csv_rows(
        PathUtils.output_path(cfg.out, "events.csv"),
        ["time", "mid_price", "return", "base_imbalance"],
        zip(series.times, series.mid_prices, series.returns, series.base_imbalances),
    )
    _write_summary(
        cfg,
        "ingest",
        {
            "records": len(book),
            "retained_events": len(series),
            "crossed_dropped": book.crossed_dropped,
            "duplicates_collapsed": book.duplicates_collapsed,
            "level_count": cfg.level_count,
            "depth": cfg.hyperparams.depth,
        },
    )
    return EXIT_OK


def cmd_analyze(cfg: RunConfig, args: argparse.Namespace) -> int:
    book = _load_book(cfg)
    try:
        series = extract_events(book, cfg.hyperparams.depth)
    except EmptySeriesError as e:
        logger.warning(f"decile analysis skipped: {e}")
        series = None

    summary: Dict[str, Any] = dataset_summary(book, series)
    if series is not None:
        try:
            table = decile_correlation(series)
        except InsufficientDataError as e:
            logger.warning(f"decile analysis skipped: {e}")
            summary["deciles_skipped"] = str(e)
        else:
            summary["rho"] = table.rho
            write_csv_rows(
                PathUtils.output_path(cfg.out, "deciles.csv"),
                ["decile", "count", "mean_bi", "mean_return"],
                table.rows(),
            )
    else:
        summary["deciles_skipped"] = "no non-zero-return events"

    ohlc = daily_ohlc(book)
    write_csv_rows(
        PathUtils.output_path(cfg.out, "ohlc.csv"),
        ["day", "open", "high", "low", "close"],
        ohlc[["day", "open", "high", "low", "close"]].itertuples(index=False, name=None),
    )
    _write_summary(cfg, "summary", summary)
    return EXIT_OK


def cmd_fit_hawkes(cfg: RunConfig, args: argparse.Namespace) -> int:
    series = _load_series(cfg)
    window = _select_window(cfg, series)
    params, diagnostics = fit_hawkes_stage(series, window)

    train = series.between(window.hawkes_train_start, window.t0)
    gof = time_rescaling_test(params, train.times, origin=window.hawkes_train_start)
    _write_summary(
        cfg,
        "hawkes",
        {
            "t0": window.t0,
            "train_start": window.hawkes_train_start,
            "params": params.to_dict(),
            "diagnostics": diagnostics.to_dict(),
            "ks": {"statistic": gof.statistic, "pvalue": gof.pvalue},
        },
    )
    return EXIT_OK


def cmd_forecast(cfg: RunConfig, args: argparse.Namespace) -> int:
    series = _load_series(cfg)
    hp = cfg.hyperparams
    window = _select_window(cfg, series)
    params, _ = fit_hawkes_stage(series, window)

    forecast_cfg = cfg.options.forecast_config(hp, cfg.seed)
    predictions = rolling_forecast(
        series.times, params, (window.t0, window.sim_end), forecast_cfg, np.random.default_rng(cfg.seed)
    )
    write_csv_rows(
        PathUtils.output_path(cfg.out, "forecast.csv"),
        ["issue_time", "predicted_time", "actual_time"],
        ((t, t_hat, oracle_next(series.times, t)) for t, t_hat in predictions),
    )

    shown = series.between(window.hawkes_train_start, window.sim_end)
    grid = np.arange(window.hawkes_train_start, window.sim_end, cfg.step)
    write_csv_rows(
        PathUtils.output_path(cfg.out, "intensity.csv"),
        ["time", "intensity"],
        zip(grid, intensity_path(params, shown.times, grid)),
    )
    return EXIT_OK


def cmd_backtest(cfg: RunConfig, args: argparse.Namespace) -> int:
    series = _load_series(cfg)
    window = _select_window(cfg, series)
    result = run_scenario(
        series, window, cfg.predictor, cfg.hyperparams, seed=cfg.seed, options=cfg.options
    )
    if not result.ok:
        logger.error(f"backtest failed: {result.message}")
        return EXIT_DATA if result.stage == "validate" else EXIT_FIT

    _write_summary(cfg, "result", {**result.to_dict(), "hyperparams": asdict(cfg.hyperparams)})
    write_csv_rows(
        PathUtils.output_path(cfg.out, "profit_series.csv"),
        ["time", "cumulative_profit", "mid_price"],
        result.profit_rows(),
    )
    write_csv_rows(
        PathUtils.output_path(cfg.out, "records.csv"),
        ["issue_time", "predicted_time", "bi", "predicted_return", "reference_return", "reference_time"],
        (
            (r.issue_time, r.predicted_time, r.bi, r.predicted_return, r.reference_return, r.reference_time)
            for r in result.records
        ),
    )
    return EXIT_OK


def cmd_montecarlo(cfg: RunConfig, args: argparse.Namespace) -> int:
    series = _load_series(cfg)
    hp = cfg.hyperparams
    windows = sample_scenario_windows(
        series,
        hp.hawkes_train_min,
        hp.coe_train_min,
        hp.sim_min,
        cfg.scenarios,
        cfg.settings,
        rng=np.random.default_rng(cfg.seed),
    )
    if not windows:
        raise InsufficientDataError("no scenario window in the data passes validation")
    if len(windows) < cfg.scenarios:
        logger.warning(f"only {len(windows)} of {cfg.scenarios} requested scenario(s) are available")

    report = monte_carlo(
        series, windows, PREDICTOR_NAMES, hp, base_seed=cfg.seed, options=cfg.options, workers=cfg.workers
    )
    write_csv_rows(PathUtils.output_path(cfg.out, "aggregate.csv"), AGGREGATE_COLUMNS, report.aggregate_rows())
    write_csv_rows(
        PathUtils.output_path(cfg.out, "boxstats.csv"),
        ["predictor", "metric", "min", "q1", "median", "q3", "max"],
        report.box_rows(),
    )
    _write_summary(cfg, "montecarlo", {**report.summary(), "hyperparams": asdict(hp)})
    return EXIT_OK


def read_grid(path: str) -> List[HyperParams]:
    """
    Read hyperparameter candidates from a CSV whose header names ``HyperParams`` fields.

    Missing columns take the default value.
    """
    try:
        frame = pd.read_csv(path, comment="#", skipinitialspace=True)
    except pd.errors.EmptyDataError:
        return []
    unknown = set(frame.columns) - set(HyperParams.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown grid column(s): {sorted(unknown)}")

    grid = []
    for row in frame.to_dict(orient="records"):
        try:
            values = {key: (int(v) if key == "depth" else float(v)) for key, v in row.items()}
            grid.append(HyperParams(**values))
        except (AssertionError, ValueError) as e:
            raise UsageError(f"bad grid row {row}: {e}") from e
    return grid


def cmd_tune(cfg: RunConfig, args: argparse.Namespace) -> int:
    grid = read_grid(args.grid)
    if not grid:
        raise UsageError(f"hyperparameter grid {args.grid} is empty")

    series = _load_series(cfg)
    if cfg.t0 is not None:
        t0 = cfg.t0
    else:
        widest = HyperParams(
            hawkes_train_min=max(hp.hawkes_train_min for hp in grid),
            coe_train_min=max(hp.coe_train_min for hp in grid),
            sim_min=max(hp.sim_min for hp in grid),
        )
        t0 = _select_window(cfg, series, widest).t0

    best, rows = tune_hyperparameters(series, grid, t0, seed=cfg.seed, options=cfg.options)
    write_csv_rows(PathUtils.output_path(cfg.out, "tuning.csv"), TuningRow.header(), (r.as_row() for r in rows))

    chosen = next(r for r in rows if r.hp is best)
    _write_summary(
        cfg,
        "best",
        {"t0": t0, "index": chosen.index, "hyperparams": asdict(best), "mean_abs_error": chosen.mean_abs_error},
    )
    return EXIT_OK


SYNTH_FLAGS = (
    "duration",
    "start",
    "mu",
    "alpha",
    "beta",
    "noise_ratio",
    "bi_persistence",
    "return_model",
    "gain",
    "repeat_fraction",
    "resolution",
)


def cmd_synth(cfg: RunConfig, args: argparse.Namespace) -> int:
    flags = {key: getattr(args, key) for key in SYNTH_FLAGS if getattr(args, key) is not None}
    synth_cfg = SyntheticConfig.from_preset(
        args.preset,
        level_count=cfg.level_count,
        depth=cfg.hyperparams.depth,
        seed=cfg.seed,
        **flags,
    )
    book, truth = generate_dataset(synth_cfg)

    write_lob_csv(PathUtils.output_path(cfg.out, "synthetic.csv"), book)
    write_csv_rows(
        PathUtils.output_path(cfg.out, "truth_events.csv"),
        ["time", "bi", "return", "clean_return", "price"],
        (
            (truth.times[k], truth.bi[k], truth.returns[k], truth.clean_returns[k], truth.prices[k])
            for k in range(len(truth.returns))
        ),
    )
    _write_summary(
        cfg,
        "truth",
        {
            "config": asdict(synth_cfg),
            "hawkes": truth.hawkes.to_dict(),
            "coe": truth.coe.to_dict() if truth.coe is not None else None,
            "events": len(truth.times),
            "records": len(book),
        },
    )
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "analyze": cmd_analyze,
    "fit-hawkes": cmd_fit_hawkes,
    "forecast": cmd_forecast,
    "backtest": cmd_backtest,
    "montecarlo": cmd_montecarlo,
    "tune": cmd_tune,
    "synth": cmd_synth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"tickcast: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = load_config(args.config, _overrides(args))
    except (dacite.DaciteError, ValueError, AssertionError, OSError) as e:
        logger.error(f"invalid configuration: {e}")
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](cfg, args)
    except (UsageError, AssertionError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except ScenarioError as e:
        logger.error(str(e))
        return EXIT_DATA if e.stage == "validate" else EXIT_FIT
    except DATA_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_DATA
    except FIT_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
