# Copyright 2024 The tickcast Authors.

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from tickcast.hawkes.forecasting import ForecastConfig, HawkesForecaster, predict_next_event
from tickcast.hawkes.intensity import HawkesParams, IntensityState

logger = logging.getLogger(__name__)

__all__ = [
    "PREDICTOR_NAMES",
    "NAIVE_OFFSET",
    "PredictorKind",
    "oracle_next",
    "naive_next",
    "ma_next",
    "hawkes_next",
    "EventTimePredictor",
    "OraclePredictor",
    "NaivePredictor",
    "MovingAveragePredictor",
    "HawkesPredictor",
    "build_predictor",
]

PREDICTOR_NAMES = ("oracle", "naive", "ma", "hawkes")

# the resolution of the data, one second
NAIVE_OFFSET = 1.0


@dataclass
class PredictorKind:
    """
    Next-event-time strategy selected by name.

    Args:
        name (str): one of ``oracle``, ``naive``, ``ma``, ``hawkes``
        window (float): moving-average window ``W`` in seconds
        forecast (ForecastConfig): Hawkes forecast settings
    """

    name: str = "hawkes"
    window: float = 60.0
    forecast: ForecastConfig = field(default_factory=ForecastConfig)

    def __post_init__(self):
        self.name = self.name.lower()
        assert self.name in PREDICTOR_NAMES, (
            f"Predictor must be one of {list(PREDICTOR_NAMES)}, but got {self.name}."
        )
        assert self.window > 0, "``window`` must be positive."


def oracle_next(actual_events: np.ndarray, t: float) -> Optional[float]:
    """First actual event strictly after ``t``, or None when the series is exhausted."""
    idx = int(np.searchsorted(actual_events, t, side="right"))
    if idx >= len(actual_events):
        return None
    return float(actual_events[idx])


def naive_next(t: float) -> float:
    return t + NAIVE_OFFSET


def ma_next(history: np.ndarray, t: float, W: float = 60.0) -> float:
    """
    ``t`` plus the mean gap between the events in ``[t - W, t]``.

    With fewer than two events in the window the naive one-second offset is used.
    """
    lo = int(np.searchsorted(history, t - W, side="left"))
    hi = int(np.searchsorted(history, t, side="right"))
    window = history[lo:hi]
    if len(window) < 2:
        return naive_next(t)
    return t + float(window[-1] - window[0]) / (len(window) - 1)


def hawkes_next(
    state: IntensityState,
    observed: np.ndarray,
    t: float,
    cfg: ForecastConfig,
    rng: np.random.Generator,
) -> Optional[float]:
    """Absorb the observed events in ``(state.last_time, t]`` and predict the next one."""
    observed = np.asarray(observed, dtype=np.float64)
    fresh = observed[(observed > state.last_time) & (observed <= t)]
    return predict_next_event(state.absorb_many(fresh), t, cfg, rng)


class EventTimePredictor(ABC):
    """
    Common interface of the next-event-time strategies.

    ``prepare`` hands the predictor the scenario's event times (future ones
    included; only the oracle looks ahead) and the start of the simulation span.
    """

    name = ""

    def __init__(self):
        self.events = np.empty(0, dtype=np.float64)
        self.t0 = 0.0

    def prepare(
        self,
        events: Sequence[float],
        t0: float,
        params: Optional[HawkesParams] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> "EventTimePredictor":
        self.events = np.asarray(events, dtype=np.float64)
        self.t0 = float(t0)
        return self

    @property
    def needs_hawkes_fit(self) -> bool:
        return False

    @abstractmethod
    def predict(self, t: float) -> Optional[float]:
        """Predicted next event time for issue time ``t``, strictly after ``t``, or None."""


class OraclePredictor(EventTimePredictor):
    name = "oracle"

    def predict(self, t: float) -> Optional[float]:
        return oracle_next(self.events, t)


class NaivePredictor(EventTimePredictor):
    name = "naive"

    def predict(self, t: float) -> Optional[float]:
        return naive_next(t)


class MovingAveragePredictor(EventTimePredictor):
    name = "ma"

    def __init__(self, window: float = 60.0):
        super().__init__()
        self.window = window

    def predict(self, t: float) -> Optional[float]:
        return ma_next(self.events, t, self.window)


class HawkesPredictor(EventTimePredictor):
    name = "hawkes"

    def __init__(self, forecast: Optional[ForecastConfig] = None):
        super().__init__()
        self.forecast = forecast or ForecastConfig()
        self.forecaster = None

    @property
    def needs_hawkes_fit(self) -> bool:
        return True

    def prepare(
        self,
        events: Sequence[float],
        t0: float,
        params: Optional[HawkesParams] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> "HawkesPredictor":
        super().prepare(events, t0, params, rng)
        assert params is not None, "the Hawkes predictor needs fitted parameters."
        self.forecaster = HawkesForecaster(params, self.events, self.t0, self.forecast, rng)
        return self

    def predict(self, t: float) -> Optional[float]:
        assert self.forecaster is not None, "call ``prepare`` before ``predict``."
        return self.forecaster.predict(t)


def build_predictor(kind: PredictorKind) -> EventTimePredictor:
    """
    Make the predictor named by ``kind``.

    Examples:
        >>> build_predictor(PredictorKind("ma", window=30.0))
    """
    builders = {
        "oracle": lambda: OraclePredictor(),
        "naive": lambda: NaivePredictor(),
        "ma": lambda: MovingAveragePredictor(kind.window),
        "hawkes": lambda: HawkesPredictor(kind.forecast),
    }
    return builders[kind.name]()
