# Copyright 2024 The tickcast Authors.
"""
Exact zero-order-hold propagation of companion-form filters on irregular grids.

A monic polynomial ``D(p) = p^n + c_1 p^(n-1) + ... + c_n`` defines the filter
``s = u / D(p)``; its controllable companion state is
``z = [s, s', ..., s^(n-1)]``. With the input held between samples, the state
moves from one sample to the next through ``expm`` of the augmented matrix
``[[A h, e_n h], [0, 0]]``, computed for every interval in one batched call.
"""

from typing import Sequence, Tuple

import numpy as np
from numba import njit
from scipy.linalg import expm

__all__ = [
    "companion_matrix",
    "discretize",
    "propagate_states",
    "filter_states",
    "top_derivative",
    "poly_power",
]


def companion_matrix(coefs: Sequence[float]) -> np.ndarray:
    """State matrix of ``1 / D(p)`` for ``D = [c_1, ..., c_n]`` (monic, leading 1 omitted)."""
    coefs = np.asarray(coefs, dtype=np.float64)
    n = len(coefs)
    a = np.zeros((n, n), dtype=np.float64)
    if n > 1:
        a[:-1, 1:] = np.eye(n - 1)
    a[-1, :] = -coefs[::-1]
    return a


def discretize(coefs: Sequence[float], intervals: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Zero-order-hold transition matrices for every interval.

    Args:
        coefs (Sequence[float]): ``[c_1, ..., c_n]``
        intervals (np.ndarray): interval lengths ``h_k >= 0``

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``Phi`` with shape ``(m, n, n)`` and
            ``Gamma`` with shape ``(m, n)``
    """
    a = companion_matrix(coefs)
    n = a.shape[0]
    intervals = np.asarray(intervals, dtype=np.float64)

    augmented = np.zeros((len(intervals), n + 1, n + 1), dtype=np.float64)
    augmented[:, :n, :n] = a[None, :, :] * intervals[:, None, None]
    augmented[:, n - 1, n] = intervals
    if len(intervals) == 0:
        return np.zeros((0, n, n)), np.zeros((0, n))

    blocks = expm(augmented)
    return np.ascontiguousarray(blocks[:, :n, :n]), np.ascontiguousarray(blocks[:, :n, n])


@njit(nogil=True)
def propagate_states(phi, gamma, inputs, state0):
    """
    ``z_{k+1} = Phi_k z_k + Gamma_k u_k`` with ``z_0 = state0``.

    Returns the state at every sample, ``len(inputs)`` rows; the last input
    is never applied.
    """
    m = len(inputs)
    n = len(state0)
    out = np.empty((m, n), dtype=np.float64)
    z = state0.copy()
    nxt = np.empty(n, dtype=np.float64)
    for k in range(m):
        for i in range(n):
            out[k, i] = z[i]
        if k == m - 1:
            break
        for i in range(n):
            acc = gamma[k, i] * inputs[k]
            for j in range(n):
                acc += phi[k, i, j] * z[j]
            nxt[i] = acc
        for i in range(n):
            z[i] = nxt[i]
    return out


def filter_states(
    coefs: Sequence[float],
    times: np.ndarray,
    inputs: np.ndarray,
    state0: np.ndarray = None,
    discretized: Tuple[np.ndarray, np.ndarray] = None,
) -> np.ndarray:
    """
    Companion states of ``u / D(p)`` at every sample time.

    Args:
        coefs (Sequence[float]): ``[c_1, ..., c_n]``
        times (np.ndarray): strictly increasing sample times
        inputs (np.ndarray): input held on ``[t_k, t_{k+1})``
        state0 (np.ndarray): state at ``times[0]``, zero when None
        discretized (Tuple[np.ndarray, np.ndarray]): precomputed :func:`discretize` output

    Returns:
        np.ndarray: states with shape ``(len(times), n)``
    """
    n = len(coefs)
    if discretized is None:
        discretized = discretize(coefs, np.diff(times))
    phi, gamma = discretized
    if state0 is None:
        state0 = np.zeros(n, dtype=np.float64)
    return propagate_states(phi, gamma, np.asarray(inputs, dtype=np.float64), np.asarray(state0, dtype=np.float64))


def top_derivative(coefs: Sequence[float], states: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """``s^(n) = u - sum_j c_j s^(n-j)`` at each sample, with the input in force after the sample."""
    coefs = np.asarray(coefs, dtype=np.float64)
    return np.asarray(inputs, dtype=np.float64) - states @ coefs[::-1]


def poly_power(coefs: Sequence[float], power: int) -> np.ndarray:
    """Monic coefficients (leading 1 omitted) of ``D(p)^power``."""
    poly = np.array([1.0])
    full = np.concatenate(([1.0], np.asarray(coefs, dtype=np.float64)))
    for _ in range(power):
        poly = np.polymul(poly, full)
    return poly[1:]
