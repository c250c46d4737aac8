# Copyright 2024 The tickcast Authors.

import math
from dataclasses import dataclass, replace
from typing import Dict, Sequence

import numpy as np
from numba import njit

from tickcast.errors import DomainError, HistoryOrderError

__all__ = [
    "HawkesParams",
    "IntensityState",
    "check_sorted",
    "intensity_at",
    "intensity_path",
]


@dataclass(frozen=True)
class HawkesParams:
    """
    Exponential-kernel Hawkes parameters ``theta = [mu, alpha, beta]``.

    ``lambda(t) = mu + sum_{t_k < t} alpha * exp(-beta * (t - t_k))``

    Args:
        mu (float): baseline intensity in events per second, ``> 0``
        alpha (float): jump of the intensity at each event, ``>= 0``
            (``0`` reduces the process to a homogeneous Poisson process)
        beta (float): decay rate in 1/s, ``> 0``
    """

    mu: float
    alpha: float
    beta: float

    def __post_init__(self):
        values = (self.mu, self.alpha, self.beta)
        if not all(math.isfinite(v) for v in values):
            raise DomainError(f"Hawkes parameters must be finite, got {values}")
        if self.mu <= 0 or self.beta <= 0 or self.alpha < 0:
            raise DomainError(
                f"Hawkes parameters need mu > 0, alpha >= 0 and beta > 0, got {values}"
            )

    @property
    def branching_ratio(self) -> float:
        """Expected number of direct offspring per event; ``< 1`` is stationary."""
        return self.alpha / self.beta

    @property
    def stationary_intensity(self) -> float:
        """``mu / (1 - alpha / beta)``, infinite when the process is not stationary."""
        if self.branching_ratio >= 1.0:
            return float("inf")
        return self.mu / (1.0 - self.branching_ratio)

    def to_array(self) -> np.ndarray:
        return np.array([self.mu, self.alpha, self.beta], dtype=np.float64)

    @classmethod
    def from_array(cls, theta: Sequence[float]) -> "HawkesParams":
        mu, alpha, beta = (float(v) for v in theta)
        return cls(mu=mu, alpha=alpha, beta=beta)

    def to_dict(self) -> Dict[str, float]:
        return {
            "mu": self.mu,
            "alpha": self.alpha,
            "beta": self.beta,
            "branching_ratio": self.branching_ratio,
        }


@njit(nogil=True)
def _absorb(times, last_time, decayed_sum, alpha, beta):
    for i in range(len(times)):
        decayed_sum = decayed_sum * math.exp(-beta * (times[i] - last_time)) + alpha
        last_time = times[i]
    return last_time, decayed_sum


@dataclass(frozen=True)
class IntensityState:
    """
    Recursive carrier of the excitation sum.

    ``decayed_sum`` is ``sum alpha * exp(-beta * (last_time - t_k))`` over the
    absorbed events, so ``lambda(last_time) = mu + decayed_sum``.
    """

    params: HawkesParams
    last_time: float
    decayed_sum: float = 0.0

    @classmethod
    def baseline(cls, params: HawkesParams, t: float) -> "IntensityState":
        """State with no absorbed events."""
        return cls(params=params, last_time=float(t), decayed_sum=0.0)

    @property
    def intensity(self) -> float:
        return self.params.mu + self.decayed_sum

    def _check_forward(self, t: float) -> None:
        if t < self.last_time:
            raise HistoryOrderError(
                f"can not move an intensity state back from {self.last_time!r} to {t!r}"
            )

    def intensity_at(self, t: float) -> float:
        """Intensity at ``t >= last_time`` with no further events."""
        self._check_forward(t)
        p = self.params
        return p.mu + self.decayed_sum * math.exp(-p.beta * (t - self.last_time))

    def decay_to(self, t: float) -> "IntensityState":
        self._check_forward(t)
        decayed = self.decayed_sum * math.exp(-self.params.beta * (t - self.last_time))
        return replace(self, last_time=float(t), decayed_sum=decayed)

    def absorb(self, t_event: float) -> "IntensityState":
        """Move to ``t_event`` and add the event's jump."""
        state = self.decay_to(t_event)
        return replace(state, decayed_sum=state.decayed_sum + self.params.alpha)

    def absorb_many(self, times: np.ndarray) -> "IntensityState":
        """Absorb sorted event times that are not before ``last_time``."""
        times = np.asarray(times, dtype=np.float64)
        if len(times) == 0:
            return self
        check_sorted(times)
        self._check_forward(float(times[0]))
        last_time, decayed = _absorb(
            times, self.last_time, self.decayed_sum, self.params.alpha, self.params.beta
        )
        return replace(self, last_time=float(last_time), decayed_sum=float(decayed))


def check_sorted(times: np.ndarray) -> None:
    """Raise :class:`HistoryOrderError` for a decreasing step in ``times``."""
    if len(times) > 1 and np.any(np.diff(times) < 0):
        raise HistoryOrderError("event history must be sorted in time")


def intensity_at(
    params: HawkesParams,
    history: Sequence[float],
    t: float,
    method: str = "direct",
) -> float:
    """
    Conditional intensity at ``t`` given the events strictly before ``t``.

    Args:
        params (HawkesParams): parameters
        history (Sequence[float]): sorted event times; events at or after ``t`` are ignored
        t (float): evaluation time
        method (str): ``direct`` sums every kernel term, ``recursive`` folds the
            history through :class:`IntensityState`; both agree to rounding

    Returns:
        float: ``lambda(t)``
    """
    assert method in ("direct", "recursive"), "``method`` must be 'direct' or 'recursive'."
    history = np.asarray(history, dtype=np.float64)
    check_sorted(history)
    past = history[: np.searchsorted(history, t, side="left")]

    if method == "direct":
        return params.mu + params.alpha * float(np.sum(np.exp(-params.beta * (t - past))))

    if len(past) == 0:
        return params.mu
    state = IntensityState.baseline(params, past[0]).absorb_many(past)
    return state.intensity_at(t)


@njit(nogil=True)
def _intensity_path(events, grid, mu, alpha, beta):
    out = np.empty(len(grid), dtype=np.float64)
    j = 0
    decayed_sum = 0.0
    last_time = grid[0] if len(events) == 0 else min(grid[0], events[0])
    for i in range(len(grid)):
        t = grid[i]
        while j < len(events) and events[j] < t:
            decayed_sum = decayed_sum * math.exp(-beta * (events[j] - last_time)) + alpha
            last_time = events[j]
            j += 1
        if t >= last_time:
            out[i] = mu + decayed_sum * math.exp(-beta * (t - last_time))
        else:
            out[i] = mu
    return out


def intensity_path(params: HawkesParams, events: Sequence[float], grid: Sequence[float]) -> np.ndarray:
    """
    Intensity on a sorted time grid given observed events (strict past at each point).

    Args:
        params (HawkesParams): parameters
        events (Sequence[float]): sorted event times
        grid (Sequence[float]): sorted evaluation times

    Returns:
        np.ndarray: ``lambda`` at each grid point
    """
    events = np.asarray(events, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    check_sorted(events)
    check_sorted(grid)
    if len(grid) == 0:
        return np.empty(0, dtype=np.float64)
    return _intensity_path(events, grid, params.mu, params.alpha, params.beta)
