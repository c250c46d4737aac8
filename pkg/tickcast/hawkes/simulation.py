# Copyright 2024 The tickcast Authors.

import logging
from typing import Optional, Tuple

import numpy as np

from tickcast.hawkes.intensity import HawkesParams, IntensityState

logger = logging.getLogger(__name__)

__all__ = ["simulate_hawkes", "warm_up", "warm_up_events"]

_CHUNK = 4096


def simulate_hawkes(
    params: HawkesParams,
    t_start: float,
    t_end: float,
    rng: np.random.Generator,
    state: Optional[IntensityState] = None,
) -> Tuple[np.ndarray, IntensityState]:
    """
    Simulate event times on ``(t_start, t_end]`` by Ogata thinning.

    Between events the exponential-kernel intensity only decays, so the
    intensity right after the last accepted (or rejected) candidate bounds it
    until the next candidate.

    Args:
        params (HawkesParams): parameters
        t_start (float): start of the simulation
        t_end (float): end of the simulation
        rng (np.random.Generator): random generator
        state (Optional[IntensityState]): excitation carried in from the past;
            the bare baseline at ``t_start`` when None

    Returns:
        Tuple[np.ndarray, IntensityState]: simulated times and the state at ``t_end``
    """
    assert t_end >= t_start, "``t_end`` must not be before ``t_start``."
    if state is None:
        state = IntensityState.baseline(params, t_start)
    state = state.decay_to(t_start)

    mu, alpha, beta = params.mu, params.alpha, params.beta
    excitation = state.decayed_sum
    t = float(t_start)
    times = []

    gaps = rng.standard_exponential(_CHUNK)
    marks = rng.random(_CHUNK)
    cursor = 0

    while True:
        if cursor == _CHUNK:
            gaps = rng.standard_exponential(_CHUNK)
            marks = rng.random(_CHUNK)
            cursor = 0

        bound = mu + excitation
        dt = gaps[cursor] / bound
        u = marks[cursor]
        cursor += 1

        if t + dt > t_end:
            break

        t += dt
        excitation *= np.exp(-beta * dt)
        if u * bound <= mu + excitation:
            times.append(t)
            excitation += alpha

    times = np.asarray(times, dtype=np.float64)
    final = IntensityState(params=params, last_time=t, decayed_sum=float(excitation))
    return times, final.decay_to(t_end)


def warm_up(
    params: HawkesParams,
    t_start: float,
    t_warm: float,
    rng: np.random.Generator,
) -> IntensityState:
    """
    Let the fitted model generate events on ``[t_start - t_warm, t_start]``.

    The simulated events only shape the returned state; they are never data.
    ``t_warm = 0`` gives the baseline state, ``lambda = mu``.
    """
    state, _ = warm_up_events(params, t_start, t_warm, rng)
    return state


def warm_up_events(
    params: HawkesParams,
    t_start: float,
    t_warm: float,
    rng: np.random.Generator,
) -> Tuple[IntensityState, np.ndarray]:
    """:func:`warm_up` that also hands back the simulated event times."""
    assert t_warm >= 0, "``t_warm`` must not be negative."
    if t_warm == 0:
        return IntensityState.baseline(params, t_start), np.empty(0, dtype=np.float64)

    times, state = simulate_hawkes(params, t_start - t_warm, t_start, rng)
    logger.debug(
        f"warm-up produced {len(times)} event(s), intensity at start {state.intensity:.6g}"
    )
    return state, times
