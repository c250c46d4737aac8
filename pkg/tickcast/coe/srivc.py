# Copyright 2024 The tickcast Authors.

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tickcast.coe.filtering import discretize, filter_states, poly_power, top_derivative
from tickcast.coe.model import CoeModel, CoeParams
from tickcast.errors import (
    HistoryOrderError,
    InsufficientDataError,
    SingularSystemError,
    UnstableModelError,
)

logger = logging.getLogger(__name__)

__all__ = ["CoeFitConfig", "CoeFitDiagnostics", "srivc_fit", "fit_percent", "stabilize"]

# fit percentages below this mean the input explains nothing
INFORMATIVE_FIT = 5.0
# number of slowest time constants dropped while filter transients die out
SETTLE_TIME_CONSTANTS = 10.0


@dataclass
class CoeFitConfig:
    """
    SRIVC settings.

    Args:
        na (int): denominator order
        nb (int): numerator order, ``nb <= na``
        max_iterations (int): iteration cap
        tolerance (float): relative parameter change that stops the iteration
        prefilter_bandwidth (Optional[float]): initial prefilter pole in 1/s,
            one over the median event gap when None
        regularization (float): relative ridge added when the normal equations are singular
    """

    na: int = 2
    nb: int = 1
    max_iterations: int = 30
    tolerance: float = 1e-4
    prefilter_bandwidth: Optional[float] = None
    regularization: float = 1e-8

    def __post_init__(self):
        assert self.na >= 1, "``na`` must be at least 1."
        assert 0 <= self.nb <= self.na, "``nb`` must lie within [0, na]."
        assert self.max_iterations >= 1, "``max_iterations`` must be at least 1."
        assert self.tolerance > 0, "``tolerance`` must be positive."
        assert self.regularization > 0, "``regularization`` must be positive."

    @property
    def min_events(self) -> int:
        return 10 * (self.na + self.nb + 1)


@dataclass
class CoeFitDiagnostics:
    iterations: int
    converged: bool
    residual_norm: float
    fit_percent: float
    informative: bool
    stabilized: int = 0
    regularized: int = 0
    n_events: int = 0
    oe_norms: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)


def fit_percent(y: np.ndarray, y_hat: np.ndarray) -> float:
    """``100 (1 - ||y - y_hat|| / ||y - mean(y)||)``."""
    spread = np.linalg.norm(y - y.mean())
    if spread == 0:
        return 0.0
    return float(100.0 * (1.0 - np.linalg.norm(y - y_hat) / spread))


def stabilize(a: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Mirror roots of ``A(p)`` with non-negative real part into the left half-plane."""
    roots = np.roots(np.concatenate(([1.0], a)))
    unstable = roots.real >= 0
    if not unstable.any():
        return a, False
    roots = np.where(unstable, -np.abs(roots.real) - 1e-9 + 1j * roots.imag, roots)
    return np.real(np.poly(roots))[1:], True


def _solve_iv(zeta: np.ndarray, phi: np.ndarray, target: np.ndarray, eps: float) -> Tuple[np.ndarray, bool]:
    normal = zeta.T @ phi
    rhs = zeta.T @ target
    try:
        if np.linalg.cond(normal) < 1e14:
            return np.linalg.solve(normal, rhs), False
    except np.linalg.LinAlgError:
        pass

    scale = max(float(np.abs(normal).max()), 1e-300)
    try:
        theta = np.linalg.solve(normal + eps * scale * np.eye(len(rhs)), rhs)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"IV normal equations are singular: {e}")
    if not np.all(np.isfinite(theta)):
        raise SingularSystemError("IV normal equations are singular after regularization")
    return theta, True


def _regressors(
    times: np.ndarray,
    u: np.ndarray,
    y: np.ndarray,
    a_hat: np.ndarray,
    b_hat: np.ndarray,
    nb: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Prefiltered regressor, instrument, target and simulated output.

    The measured output is treated as the model output plus a zero-order-held
    residual, so that ``y / A_hat`` can be filtered exactly between samples.
    """
    na = len(a_hat)
    intervals = np.diff(times)
    discretized = discretize(a_hat, intervals)

    # u / A_hat: filtered input derivatives and, through B_hat, the model output
    v = filter_states(a_hat, times, u, discretized=discretized)
    v_full = np.column_stack((v, top_derivative(a_hat, v, u)))
    x_hat = sum(b_hat[j] * v_full[:, nb - j] for j in range(nb + 1))

    # y / A_hat = x_hat / A_hat + r / A_hat, with x_hat / A_hat = B_hat u / A_hat^2
    residual = y - x_hat
    r_f = filter_states(a_hat, times, residual, discretized=discretized)

    a_sq = poly_power(a_hat, 2)
    w = filter_states(a_sq, times, u)
    w_full = np.column_stack((w, top_derivative(a_sq, w, u)))
    x_f = np.column_stack(
        [sum(b_hat[j] * w_full[:, nb - j + i] for j in range(nb + 1)) for i in range(na)]
    )
    y_f = x_f + r_f
    target = y - y_f @ a_hat[::-1]

    u_part = np.column_stack([v_full[:, nb - j] for j in range(nb + 1)])
    phi = np.column_stack((-y_f[:, ::-1], u_part))
    zeta = np.column_stack((-x_f[:, ::-1], u_part))
    return phi, zeta, target, x_hat


def _settle_mask(times: np.ndarray, a_hat: np.ndarray) -> np.ndarray:
    slowest = float(np.min(np.abs(np.roots(np.concatenate(([1.0], a_hat))).real)))
    span = times[-1] - times[0]
    settle = min(SETTLE_TIME_CONSTANTS / max(slowest, 1e-12), 0.25 * span)
    mask = times >= times[0] + settle
    mask[0] = False
    return mask


def srivc_fit(
    times: Sequence[float],
    bi: Sequence[float],
    r: Sequence[float],
    cfg: Optional[CoeFitConfig] = None,
) -> Tuple[CoeParams, CoeFitDiagnostics]:
    """
    Identify a COE model by simplified refined instrumental variables.

    Each iteration filters input and output through ``1 / A_hat(p)``, takes
    the instruments from the noise-free simulated output and solves the IV
    normal equations. The first iteration is plain least squares from the
    prefilter ``(p + w)^na``. Unstable denominators are reflected into the
    left half-plane before the next iteration.

    Args:
        times (Sequence[float]): strictly increasing event times
        bi (Sequence[float]): base imbalance, held between events
        r (Sequence[float]): returns at the events
        cfg (Optional[CoeFitConfig]): settings, defaults when None

    Returns:
        Tuple[CoeParams, CoeFitDiagnostics]: stable model and diagnostics

    Raises:
        InsufficientDataError: fewer than ``10 (na + nb + 1)`` events
        HistoryOrderError: times not strictly increasing
        SingularSystemError: normal equations singular after regularization
        UnstableModelError: every iteration produced an unstable denominator
    """
    cfg = cfg or CoeFitConfig()
    times = np.asarray(times, dtype=np.float64)
    u = np.asarray(bi, dtype=np.float64)
    y_raw = np.asarray(r, dtype=np.float64)
    assert len(times) == len(u) == len(y_raw), "``times``, ``bi`` and ``r`` must be aligned."

    if len(times) < cfg.min_events:
        raise InsufficientDataError(
            f"COE fit needs at least {cfg.min_events} events, got {len(times)}"
        )
    if np.any(np.diff(times) <= 0):
        raise HistoryOrderError("COE training times must be strictly increasing")

    times = times - times[0]
    scale = float(np.std(y_raw))
    if scale == 0:
        scale = 1.0
    y = y_raw / scale

    na, nb = cfg.na, cfg.nb
    omega = cfg.prefilter_bandwidth or 1.0 / float(np.median(np.diff(times)))
    a_hat = np.real(np.poly(-omega * np.ones(na)))[1:]
    b_hat = np.zeros(nb + 1)

    diagnostics = CoeFitDiagnostics(
        iterations=0,
        converged=False,
        residual_norm=float("nan"),
        fit_percent=float("nan"),
        informative=False,
        n_events=int(len(times)),
    )
    any_stable = False
    theta_old = np.concatenate((a_hat, b_hat))

    for it in range(cfg.max_iterations):
        phi, zeta, target, x_hat = _regressors(times, u, y, a_hat, b_hat, nb)
        mask = _settle_mask(times, a_hat)

        if it > 0:
            oe = float(np.linalg.norm(y - x_hat))
            if diagnostics.oe_norms and oe > diagnostics.oe_norms[-1]:
                logger.debug(f"output error rose at iteration {it}: {oe:.6g}")
            diagnostics.oe_norms.append(oe)

        instruments = phi if it == 0 else zeta
        theta, regularized = _solve_iv(instruments[mask], phi[mask], target[mask], cfg.regularization)
        diagnostics.regularized += int(regularized)

        a_new, was_unstable = stabilize(theta[:na])
        if was_unstable:
            diagnostics.stabilized += 1
            logger.warning(f"SRIVC iteration {it} gave an unstable denominator, reflected")
        else:
            any_stable = True

        theta_new = np.concatenate((a_new, theta[na:]))
        change = np.linalg.norm(theta_new - theta_old) / max(np.linalg.norm(theta_old), 1e-300)
        logger.debug(f"SRIVC iteration {it}: theta={theta_new}, change={change:.3e}")

        a_hat, b_hat, theta_old = a_new, theta[na:], theta_new
        diagnostics.iterations = it + 1
        if it > 0 and change < cfg.tolerance:
            diagnostics.converged = True
            break

    if not any_stable:
        raise UnstableModelError(
            f"every one of {diagnostics.iterations} SRIVC iteration(s) was unstable"
        )

    params = CoeParams(a=tuple(a_hat), b=tuple(b_hat * scale))
    simulated, _ = CoeModel(params).simulate(times, u)
    diagnostics.residual_norm = float(np.linalg.norm(y_raw - simulated))
    diagnostics.fit_percent = fit_percent(y_raw, simulated)
    diagnostics.informative = diagnostics.fit_percent >= INFORMATIVE_FIT

    if not diagnostics.converged:
        logger.warning(f"SRIVC stopped after {diagnostics.iterations} iteration(s) without converging")
    if not diagnostics.informative:
        logger.warning(f"COE fit explains {diagnostics.fit_percent:.2f}% of the returns")

    logger.info(
        f"COE fit on {len(times)} event(s): a={list(params.a)}, b={list(params.b)}, "
        f"fit {diagnostics.fit_percent:.2f}%"
    )
    return params, diagnostics
