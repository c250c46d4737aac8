# Copyright 2024 The tickcast Authors.

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from tickcast.errors import InsufficientDataError
from tickcast.hawkes.estimation import fit_mle
from tickcast.hawkes.intensity import HawkesParams, IntensityState, check_sorted
from tickcast.hawkes.simulation import warm_up_events

logger = logging.getLogger(__name__)

__all__ = [
    "FORECAST_METHODS",
    "ForecastConfig",
    "waiting_time_quantile",
    "predict_next_event",
    "roll_predictions",
    "HawkesForecaster",
    "rolling_forecast",
]

FORECAST_METHODS = ("quantile", "draw")


@dataclass
class ForecastConfig:
    """
    Rolling next-event forecast settings.

    Args:
        step (float): issue cadence in seconds
        delta_t (float): forecast window; waits beyond it are no-predictions
        t_warm (float): warm-up duration in seconds
        rng_seed (int): seed for warm-up and draws
        condition_on_observed (bool): absorb observed events of the simulation span
        refit_every_step (bool): refit theta at every issue time
        refit_window (float): length in seconds of the refit window
        method (str): ``quantile`` takes a fixed quantile of the waiting time
            under the decaying intensity; ``draw`` takes one exponential draw
            with the intensity frozen at the issue time
        quantile (float): survival level of the ``quantile`` method, in ``(0, 1)``
        min_offset (float): predictions closer than this to the issue time are
            moved out to it (the data's time resolution, ``0`` for none)
    """

    step: float = 1.0
    delta_t: float = 5.0
    t_warm: float = 150.0
    rng_seed: int = 0
    condition_on_observed: bool = True
    refit_every_step: bool = False
    refit_window: float = 1200.0
    method: str = "quantile"
    quantile: float = 0.3
    min_offset: float = 0.0

    def __post_init__(self):
        assert self.step > 0, "``step`` must be positive."
        assert self.delta_t >= self.step, "``delta_t`` must not be shorter than ``step``."
        assert self.t_warm >= 0, "``t_warm`` must not be negative."
        assert self.refit_window > 0, "``refit_window`` must be positive."
        assert self.method in FORECAST_METHODS, (
            f"``method`` must be one of {list(FORECAST_METHODS)}, but got {self.method}."
        )
        assert 0 < self.quantile < 1, "``quantile`` must lie within (0, 1)."
        assert 0 <= self.min_offset <= self.delta_t, "``min_offset`` must lie within [0, delta_t]."


def waiting_time_quantile(state: IntensityState, t: float, q: float) -> float:
    """
    ``q``-quantile of the time from ``t`` to the next event.

    The excitation keeps decaying while nothing happens, so the wait ``x``
    has survival ``exp(-(mu * x + S * (1 - exp(-beta * x)) / beta))`` with
    ``S = lambda(t) - mu``; the quantile is the root of
    ``mu * x + S * (1 - exp(-beta * x)) / beta = -log(1 - q)``.

    Examples:
        >>> state = IntensityState.baseline(HawkesParams(mu=2.0, alpha=0.0, beta=1.0), 0.0)
        >>> waiting_time_quantile(state, 1.0, 0.5)  # log(2) / 2
        0.34657359027997264
    """
    assert 0 < q < 1, "``q`` must lie within (0, 1)."
    mu, beta = state.params.mu, state.params.beta
    excitation = state.decay_to(t).decayed_sum
    level = -math.log1p(-q)
    if excitation <= 0:
        return level / mu

    def compensator(x: float) -> float:
        return mu * x - excitation * math.expm1(-beta * x) / beta - level

    # the compensator is at least mu * x, so the root lies below level / mu
    return float(brentq(compensator, 0.0, level / mu, xtol=1e-12))


def predict_next_event(
    state: IntensityState,
    t: float,
    cfg: ForecastConfig,
    rng: np.random.Generator,
) -> Optional[float]:
    """
    Predicted time of the next event after ``t``.

    With ``method="draw"`` the wait is ``x ~ Exp(lambda(t))`` with ``lambda``
    frozen at its value at ``t``; with ``method="quantile"`` it is
    :func:`waiting_time_quantile` at ``cfg.quantile`` and ``rng`` is unused.
    Waits beyond ``delta_t`` give no prediction.

    Args:
        state (IntensityState): intensity state with ``last_time <= t``
        t (float): issue time
        cfg (ForecastConfig): forecast settings
        rng (np.random.Generator): random generator

    Returns:
        Optional[float]: predicted time ``t_hat > t``, or None when the wait
            falls outside the window
    """
    if cfg.method == "draw":
        lam = state.intensity_at(t)
        u = rng.random()
        # u in [0, 1) keeps x > 0; u == 0 is an infinite wait
        x = math.inf if u == 0.0 else -math.log(u) / lam
    else:
        x = waiting_time_quantile(state, t, cfg.quantile)

    if x > cfg.delta_t:
        return None
    t_hat = t + max(x, cfg.min_offset)
    # a wait below the float spacing of ``t`` still lands after it
    return t_hat if t_hat > t else float(np.nextafter(t, np.inf))


def roll_predictions(
    predict_fn: Callable[[float], Optional[float]],
    t0: float,
    t_end: float,
    step: float,
    delta_t: float,
) -> List[Tuple[float, float]]:
    """
    Issue predictions every ``step`` seconds on ``[t0, t_end)``.

    Issue times are grouped in consecutive ``delta_t`` windows starting at
    ``t0``; only the first prediction of a window is kept and the window's
    remaining issue times are skipped.

    Args:
        predict_fn (Callable[[float], Optional[float]]): issue time -> predicted time or None
        t0 (float): first issue time
        t_end (float): end of the span (exclusive)
        step (float): issue cadence
        delta_t (float): window length

    Returns:
        List[Tuple[float, float]]: ``(issue time, predicted time)`` pairs
    """
    assert step > 0 and delta_t > 0, "``step`` and ``delta_t`` must be positive."
    n_issues = int(math.floor((t_end - t0) / step + 1e-9))
    saved = []
    filled = -1

    for i in range(n_issues):
        t = t0 + i * step
        window = int(math.floor((t - t0) / delta_t + 1e-9))
        if window == filled:
            continue
        t_hat = predict_fn(t)
        if t_hat is None:
            continue
        assert t_hat > t, f"prediction {t_hat!r} is not after issue time {t!r}"
        saved.append((t, t_hat))
        filled = window

    return saved


class HawkesForecaster(object):
    """
    Rolling Hawkes forecaster for one simulation span.

    The intensity at an issue time ``t`` carries the warm-up events simulated
    before ``t0`` and, unless switched off, the observed events in ``[t0, t]``.

    Args:
        params (HawkesParams): fitted parameters
        events (Sequence[float]): observed event times (training and simulation span)
        t0 (float): start of the simulation span
        cfg (ForecastConfig): forecast settings
        rng (Optional[np.random.Generator]): random generator, seeded from
            ``cfg.rng_seed`` when None

    Examples:
        >>> forecaster = HawkesForecaster(params, events, t0, ForecastConfig())
        >>> forecaster.predict(t0 + 3.0)
    """

    def __init__(
        self,
        params: HawkesParams,
        events: Sequence[float],
        t0: float,
        cfg: ForecastConfig,
        rng: Optional[np.random.Generator] = None,
    ):
        self.events = np.asarray(events, dtype=np.float64)
        check_sorted(self.events)
        self.t0 = float(t0)
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
        self.params = params
        self.refits = 0

        self._state, self._warm_events = warm_up_events(params, self.t0, cfg.t_warm, self.rng)
        self._cursor = int(np.searchsorted(self.events, self.t0, side="left"))

    def state_at(self, t: float) -> IntensityState:
        """Intensity state after every conditioning event up to ``t``."""
        if self.cfg.condition_on_observed:
            hi = int(np.searchsorted(self.events, t, side="right"))
            if hi > self._cursor:
                self._state = self._state.absorb_many(self.events[self._cursor : hi])
                self._cursor = hi
        return self._state

    def _refit(self, t: float) -> None:
        lo = np.searchsorted(self.events, t - self.cfg.refit_window, side="left")
        hi = np.searchsorted(self.events, t, side="right")
        window = self.events[lo:hi]
        try:
            params, diagnostics = fit_mle(
                window, T=t, init_grid=[self.params], origin=t - self.cfg.refit_window
            )
        except InsufficientDataError as e:
            logger.debug(f"refit at {t} skipped: {e}")
            return

        self.params = params
        self.refits += 1

        conditioning = self._warm_events
        if self.cfg.condition_on_observed:
            conditioning = np.concatenate((conditioning, self.events[self._cursor_start() : hi]))
        state = IntensityState.baseline(params, self.t0 - self.cfg.t_warm)
        self._state = state.absorb_many(conditioning).decay_to(max(t, self.t0))
        self._cursor = max(int(hi), self._cursor_start())

    def _cursor_start(self) -> int:
        return int(np.searchsorted(self.events, self.t0, side="left"))

    def predict(self, t: float) -> Optional[float]:
        """Predicted next event time for issue time ``t``, or None."""
        if self.cfg.refit_every_step:
            self._refit(t)
        return predict_next_event(self.state_at(t), t, self.cfg, self.rng)


def rolling_forecast(
    events: Sequence[float],
    fitted: HawkesParams,
    span: Tuple[float, float],
    cfg: ForecastConfig,
    rng: Optional[np.random.Generator] = None,
) -> List[Tuple[float, float]]:
    """
    Per-step Hawkes forecast over ``span = (t0, t0 + T_sim)``.

    Args:
        events (Sequence[float]): observed event times
        fitted (HawkesParams): parameters fitted before ``t0``
        span (Tuple[float, float]): simulation span
        cfg (ForecastConfig): forecast settings
        rng (Optional[np.random.Generator]): random generator, from ``cfg.rng_seed`` when None

    Returns:
        List[Tuple[float, float]]: ``(issue time, predicted time)`` pairs, at most
            one per ``delta_t`` window
    """
    t0, t_end = span
    forecaster = HawkesForecaster(fitted, events, t0, cfg, rng)
    predictions = roll_predictions(forecaster.predict, t0, t_end, cfg.step, cfg.delta_t)
    logger.info(
        f"Hawkes forecast on [{t0}, {t_end}): {len(predictions)} prediction(s) saved"
    )
    return predictions
