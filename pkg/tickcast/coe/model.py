# Copyright 2024 The tickcast Authors.

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from tickcast.coe.filtering import companion_matrix, discretize, filter_states
from tickcast.errors import DomainError, HistoryOrderError

__all__ = ["CoeParams", "CoeModel", "simulate_coe", "coe_predict"]


@dataclass(frozen=True)
class CoeParams:
    """
    Continuous output-error model ``R(t) = B(p) / A(p) BI(t) + e(t)``.

    ``A(p) = p^na + a_1 p^(na-1) + ... + a_na`` and
    ``B(p) = b_0 p^nb + ... + b_nb``.

    Args:
        a (Tuple[float, ...]): denominator coefficients ``a_1 ... a_na``
        b (Tuple[float, ...]): numerator coefficients ``b_0 ... b_nb``
    """

    a: Tuple[float, ...]
    b: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        assert len(self.a) >= 1 and len(self.b) >= 1, "``a`` and ``b`` can not be empty."
        assert self.nb <= self.na, f"``nb`` ({self.nb}) must not exceed ``na`` ({self.na})."
        if not all(np.isfinite(self.a + self.b)):
            raise DomainError(f"COE coefficients must be finite, got a={self.a}, b={self.b}")

    @property
    def na(self) -> int:
        return len(self.a)

    @property
    def nb(self) -> int:
        return len(self.b) - 1

    @property
    def poles(self) -> np.ndarray:
        return np.roots(np.concatenate(([1.0], self.a)))

    @property
    def is_stable(self) -> bool:
        return bool(np.all(self.poles.real < 0))

    @property
    def theta(self) -> np.ndarray:
        return np.array(self.a + self.b, dtype=np.float64)

    @classmethod
    def from_theta(cls, theta: Sequence[float], na: int) -> "CoeParams":
        theta = [float(v) for v in theta]
        return cls(a=tuple(theta[:na]), b=tuple(theta[na:]))

    def to_dict(self) -> Dict[str, Union[List[float], int]]:
        return {"a": list(self.a), "b": list(self.b), "na": self.na, "nb": self.nb}


class CoeModel(object):
    """
    Companion-form realization of a :class:`CoeParams` model.

    The state is ``z = [s, s', ..., s^(na-1)]`` with ``s = BI / A(p)``, and the
    output is ``C z + D u``; ``D`` is non-zero only when ``nb = na``.

    Args:
        params (CoeParams): model coefficients
    """

    def __init__(self, params: CoeParams):
        self.params = params
        self.a = np.asarray(params.a, dtype=np.float64)
        self.state_matrix = companion_matrix(self.a)

        na, nb = params.na, params.nb
        c = np.zeros(na, dtype=np.float64)
        d = 0.0
        for j, bj in enumerate(params.b):
            order = nb - j
            if order < na:
                c[order] += bj
            else:
                d += bj
                c -= bj * self.a[::-1]
        self.c = c
        self.d = d

    @property
    def order(self) -> int:
        return self.params.na

    def poles(self) -> np.ndarray:
        return self.params.poles

    def dc_gain(self) -> float:
        """Steady-state output per unit of constant input, ``b_nb / a_na``."""
        a_last = self.params.a[-1]
        if a_last == 0:
            return float("inf")
        return self.params.b[-1] / a_last

    def output(self, state: np.ndarray, u: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return state @ self.c + self.d * u

    def simulate(
        self,
        times: np.ndarray,
        inputs: np.ndarray,
        state0: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Exact zero-order-hold simulation on the sample grid.

        Returns:
            Tuple[np.ndarray, np.ndarray]: outputs and states at every sample
        """
        times = np.asarray(times, dtype=np.float64)
        inputs = np.asarray(inputs, dtype=np.float64)
        assert len(times) == len(inputs), "``times`` and ``inputs`` must be aligned."
        if len(times) > 1 and np.any(np.diff(times) <= 0):
            raise HistoryOrderError("COE sample times must be strictly increasing")
        if len(times) == 0:
            return np.empty(0), np.empty((0, self.order))

        states = filter_states(self.a, times, inputs, state0)
        return self.output(states, inputs), states

    def propagate(self, state: np.ndarray, u: float, dt: float) -> np.ndarray:
        """State after holding ``u`` for ``dt`` seconds."""
        assert dt >= 0, "``dt`` must not be negative."
        phi, gamma = discretize(self.a, np.array([dt]))
        return phi[0] @ np.asarray(state, dtype=np.float64) + gamma[0] * u

    def state_at(
        self,
        times: np.ndarray,
        inputs: np.ndarray,
        t: float,
        state0: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """State at ``t`` given the held inputs up to ``t``."""
        times = np.asarray(times, dtype=np.float64)
        last = int(np.searchsorted(times, t, side="right")) - 1
        if last < 0:
            raise HistoryOrderError(f"no sample at or before {t!r}")
        _, states = self.simulate(times[: last + 1], np.asarray(inputs)[: last + 1], state0)
        return self.propagate(states[-1], float(inputs[last]), t - times[last])

    def predict(self, state: np.ndarray, t_last: float, u_now: float, t_hat: float) -> float:
        """Output at ``t_hat`` from the state at ``t_last`` with ``u_now`` held."""
        if t_hat < t_last:
            raise HistoryOrderError(
                f"prediction time {t_hat!r} is before the last event {t_last!r}"
            )
        return float(self.output(self.propagate(state, u_now, t_hat - t_last), u_now))


def simulate_coe(
    params: CoeParams,
    times: Sequence[float],
    bi: Sequence[float],
    state0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Simulate the model on an irregular grid with ``bi[k]`` held on ``[t_k, t_{k+1})``.

    Args:
        params (CoeParams): model
        times (Sequence[float]): strictly increasing sample times
        bi (Sequence[float]): input at each sample
        state0 (Optional[np.ndarray]): state at ``times[0]``, zero when None

    Returns:
        Tuple[np.ndarray, np.ndarray]: outputs and states at every sample
    """
    return CoeModel(params).simulate(times, bi, state0)


def coe_predict(
    params: CoeParams,
    times: Sequence[float],
    bi: Sequence[float],
    bi_now: float,
    t_hat: float,
) -> float:
    """
    Predicted return at ``t_hat``.

    The model is simulated over the history from a zero state, then
    propagated from the last event to ``t_hat`` with ``bi_now`` held. Measured
    returns never enter an output-error prediction.

    Args:
        params (CoeParams): identified model
        times (Sequence[float]): event times up to the issue time
        bi (Sequence[float]): base imbalance at each event
        bi_now (float): most recent base imbalance
        t_hat (float): predicted next event time

    Returns:
        float: ``R_hat`` at ``t_hat``

    Raises:
        HistoryOrderError: ``t_hat`` before the last event
    """
    times = np.asarray(times, dtype=np.float64)
    assert len(times) >= 1, "``coe_predict`` needs at least one event."
    model = CoeModel(params)
    _, states = model.simulate(times, bi)
    return model.predict(states[-1], float(times[-1]), float(bi_now), float(t_hat))
