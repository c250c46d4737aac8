# Copyright 2024 The tickcast Authors.

import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Mapping, Optional

import dacite

from tickcast.backtest.scenario import BacktestOptions, HyperParams
from tickcast.coe.srivc import CoeFitConfig
from tickcast.hawkes.forecasting import FORECAST_METHODS
from tickcast.lobdata.scenarios import ScenarioSettings
from tickcast.predictors import PREDICTOR_NAMES

logger = logging.getLogger(__name__)

__all__ = ["CONFIG_ENV", "OUTPUT_FORMATS", "RunConfig", "read_config_file", "load_config"]

CONFIG_ENV = "TICKCAST_CONFIG"
OUTPUT_FORMATS = ("json", "csv")

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass
class RunConfig:
    """
    Settings shared by every command.

    Hyperparameter keys (``hawkes_train_min``, ``coe_train_min``, ``warm_min``,
    ``delta_t``, ``sim_min``, ``depth``) may appear at the top level of a config
    file; they are moved into ``hyperparams``.
    """

    data: Optional[str] = None
    level_count: int = 10
    predictor: str = "hawkes"
    seed: int = 0
    t0: Optional[float] = None
    out: str = "out"
    format: str = "json"
    step: float = 1.0
    ma_window: float = 60.0
    stake: float = 10000.0
    match_mode: str = "nearest"
    scenarios: int = 50
    workers: int = 1
    min_gap: float = 1.0
    max_mean_max_gap: float = 2.2
    gap_window: float = 60.0
    condition_on_observed: bool = True
    refit_every_step: bool = False
    forecast_method: str = "quantile"
    quantile: float = 0.3
    min_offset: float = 0.0
    na: int = 2
    nb: int = 1
    max_iterations: int = 30
    hyperparams: HyperParams = field(default_factory=HyperParams)

    def __post_init__(self):
        assert self.level_count >= self.hyperparams.depth, (
            f"``level_count`` ({self.level_count}) must not be below the depth "
            f"({self.hyperparams.depth})."
        )
        assert self.predictor in PREDICTOR_NAMES, (
            f"Predictor must be one of {list(PREDICTOR_NAMES)}, but got {self.predictor}."
        )
        assert self.format in OUTPUT_FORMATS, (
            f"Output format must be one of {list(OUTPUT_FORMATS)}, but got {self.format}."
        )
        assert self.forecast_method in FORECAST_METHODS, (
            f"Forecast method must be one of {list(FORECAST_METHODS)}, but got {self.forecast_method}."
        )
        assert self.scenarios >= 1, "``scenarios`` must be positive."
        assert self.workers >= 1, "``workers`` must be positive."

    @property
    def settings(self) -> ScenarioSettings:
        return ScenarioSettings(
            min_gap=self.min_gap,
            max_mean_max_gap=self.max_mean_max_gap,
            gap_window=self.gap_window,
        )

    @property
    def options(self) -> BacktestOptions:
        return BacktestOptions(
            step=self.step,
            ma_window=self.ma_window,
            stake=self.stake,
            match_mode=self.match_mode,
            condition_on_observed=self.condition_on_observed,
            refit_every_step=self.refit_every_step,
            forecast_method=self.forecast_method,
            quantile=self.quantile,
            min_offset=self.min_offset,
            coe=CoeFitConfig(na=self.na, nb=self.nb, max_iterations=self.max_iterations),
            settings=self.settings,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def read_config_file(path: str) -> Dict[str, str]:
    """
    Read a flat ``key = value`` file; ``#`` starts a comment.

    Raises:
        ValueError: a line without ``=``
    """
    values = {}
    with open(path, "r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{number}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _nest(values: Mapping[str, Any]) -> Dict[str, Any]:
    hp_keys = {f.name for f in fields(HyperParams)}
    data: Dict[str, Any] = {}
    hp: Dict[str, Any] = {}
    for key, value in values.items():
        if value is None:
            continue
        if key in hp_keys:
            hp[key] = value
        elif key == "hyperparams" and isinstance(value, Mapping):
            hp.update(value)
        else:
            data[key] = value
    if hp:
        data["hyperparams"] = hp
    return data


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Build a :class:`RunConfig` from a file and command-line overrides.

    Args:
        path (Optional[str]): config file; ``$TICKCAST_CONFIG`` when None, no file when unset
        overrides (Optional[Mapping[str, Any]]): values that win over the file; None entries are ignored

    Returns:
        RunConfig: validated config

    Raises:
        dacite.DaciteError: unknown key or wrong type
        ValueError: unparsable value
    """
    path = path or os.environ.get(CONFIG_ENV)
    values: Dict[str, Any] = {}
    if path:
        values.update(read_config_file(path))
        logger.info(f"loaded config from {path}")

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    return dacite.from_dict(
        data_class=RunConfig,
        data=_nest(values),
        config=dacite.Config(
            type_hooks={int: int, float: float, bool: _to_bool, str: str},
            strict=True,
        ),
    )
