# Copyright 2024 The tickcast Authors.

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit
from scipy import stats

from tickcast.errors import HistoryOrderError
from tickcast.hawkes.intensity import HawkesParams, check_sorted

__all__ = [
    "log_likelihood",
    "compensator",
    "compensator_increments",
    "GoodnessOfFit",
    "time_rescaling_test",
]


@njit(nogil=True)
def exp_log_likelihood(times, origin, horizon, mu, alpha, beta):
    """
    O(n) log-likelihood with ``A_i = exp(-beta (t_i - t_{i-1})) (1 + A_{i-1})``.
    """
    ll = -mu * (horizon - origin)
    a = 0.0
    for i in range(len(times)):
        if i > 0:
            a = math.exp(-beta * (times[i] - times[i - 1])) * (1.0 + a)
        ll += math.log(mu + alpha * a)
        ll -= (alpha / beta) * (1.0 - math.exp(-beta * (horizon - times[i])))
    return ll


@njit(nogil=True)
def _compensator_increments(times, origin, mu, alpha, beta):
    out = np.empty(len(times), dtype=np.float64)
    excitation = 0.0  # excitation right after the previous event
    prev = origin
    for i in range(len(times)):
        dt = times[i] - prev
        out[i] = mu * dt + (excitation / beta) * (1.0 - math.exp(-beta * dt))
        excitation = excitation * math.exp(-beta * dt) + alpha
        prev = times[i]
    return out


def _validated(events: Sequence[float], horizon: float, origin: float) -> np.ndarray:
    events = np.asarray(events, dtype=np.float64)
    check_sorted(events)
    if len(events) > 0 and (events[0] < origin or events[-1] > horizon):
        raise HistoryOrderError(
            f"events must lie in ({origin!r}, {horizon!r}], "
            f"got [{events[0]!r}, {events[-1]!r}]"
        )
    return events


def log_likelihood(
    params: HawkesParams,
    events: Sequence[float],
    T: float,
    origin: float = 0.0,
) -> float:
    """
    Log-likelihood of events observed on ``(origin, T]``.

    ``sum_i log lambda(t_i) - mu (T - origin) - (alpha / beta) sum_i (1 - exp(-beta (T - t_i)))``
    with ``lambda(t_i)`` taken on the strict past.

    Args:
        params (HawkesParams): parameters
        events (Sequence[float]): sorted event times
        T (float): end of the observation window
        origin (float): start of the observation window

    Returns:
        float: log-likelihood
    """
    events = _validated(events, T, origin)
    return float(exp_log_likelihood(events, origin, T, params.mu, params.alpha, params.beta))


def compensator(params: HawkesParams, events: Sequence[float], t: float, origin: float = 0.0) -> float:
    """Integrated intensity over ``(origin, t]`` given the events before ``t``."""
    events = np.asarray(events, dtype=np.float64)
    check_sorted(events)
    past = events[(events >= origin) & (events < t)]
    return float(
        params.mu * (t - origin)
        + params.branching_ratio * np.sum(1.0 - np.exp(-params.beta * (t - past)))
    )


def compensator_increments(
    params: HawkesParams,
    events: Sequence[float],
    origin: float = 0.0,
) -> np.ndarray:
    """
    Integrated intensity between consecutive events (the first from ``origin``).

    Under the true model these are i.i.d. ``Exp(1)``.
    """
    events = np.asarray(events, dtype=np.float64)
    check_sorted(events)
    return _compensator_increments(events, origin, params.mu, params.alpha, params.beta)


@dataclass(frozen=True)
class GoodnessOfFit:
    residuals: np.ndarray
    statistic: float
    pvalue: float


def time_rescaling_test(
    params: HawkesParams,
    events: Sequence[float],
    origin: float = 0.0,
) -> GoodnessOfFit:
    """
    Kolmogorov-Smirnov test of the rescaled inter-arrival times against ``Exp(1)``.
    """
    residuals = compensator_increments(params, events, origin)
    result = stats.kstest(residuals, "expon")
    return GoodnessOfFit(
        residuals=residuals,
        statistic=float(result.statistic),
        pvalue=float(result.pvalue),
    )
