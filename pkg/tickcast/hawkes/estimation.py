# Copyright 2024 The tickcast Authors.

import itertools
import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from tickcast.errors import InsufficientDataError
from tickcast.hawkes.intensity import HawkesParams
from tickcast.hawkes.likelihood import _validated, exp_log_likelihood

logger = logging.getLogger(__name__)

__all__ = ["HawkesFitDiagnostics", "MIN_FIT_EVENTS", "moment_seed", "default_init_grid", "fit_mle"]

MIN_FIT_EVENTS = 10
GRID_SCALES = (0.5, 1.0, 2.0)
# keeps exp(log theta) finite inside the simplex search
LOG_BOUND = 30.0
PENALTY = 1e300


@dataclass
class HawkesFitDiagnostics:
    """Summary of a maximum-likelihood fit."""

    loglik: float
    iterations: int
    converged: bool
    branching_ratio: float
    n_events: int
    horizon: float
    starts: int
    message: str = ""

    def to_dict(self) -> Dict[str, Union[float, int, bool, str]]:
        return asdict(self)


def moment_seed(events: np.ndarray, T: float, origin: float = 0.0) -> HawkesParams:
    """
    Method-of-moments starting point.

    The branching ratio comes from the dispersion of counts in bins of ten
    mean gaps (``Fano ~ 1 / (1 - n)^2`` for long bins); the decay rate starts at
    the mean event rate.
    """
    span = T - origin
    rate = len(events) / span
    width = 10.0 / rate
    bins = max(int(span // width), 1)
    counts = np.histogram(events, bins=bins, range=(origin, origin + bins * width))[0]
    fano = counts.var() / counts.mean() if counts.mean() > 0 else 1.0

    n0 = float(np.clip(1.0 - 1.0 / np.sqrt(fano), 0.05, 0.9)) if fano > 1.0 else 0.1
    beta0 = rate
    return HawkesParams(mu=rate * (1.0 - n0), alpha=n0 * beta0, beta=beta0)


def default_init_grid(seed: HawkesParams) -> List[HawkesParams]:
    """3 x 3 x 3 grid of scaled copies of ``seed``."""
    return [
        HawkesParams(mu=seed.mu * s_mu, alpha=seed.alpha * s_alpha, beta=seed.beta * s_beta)
        for s_mu, s_alpha, s_beta in itertools.product(GRID_SCALES, repeat=3)
    ]


def fit_mle(
    events: Sequence[float],
    T: float,
    init_grid: Optional[Sequence[HawkesParams]] = None,
    origin: float = 0.0,
    max_iterations: int = 500,
    xatol: float = 1e-6,
) -> Tuple[HawkesParams, HawkesFitDiagnostics]:
    """
    Maximum-likelihood Hawkes fit.

    Nelder-Mead runs on ``log(mu, alpha, beta)`` from every starting point and
    the best optimum is kept. A start converges when the simplex has shrunk
    below ``xatol`` in log-space within ``max_iterations``.

    Args:
        events (Sequence[float]): sorted event times in ``(origin, T]``
        T (float): end of the observation window
        init_grid (Optional[Sequence[HawkesParams]]): starting points; a
            3 x 3 x 3 grid around the method-of-moments seed when None
        origin (float): start of the observation window
        max_iterations (int): iteration cap per start
        xatol (float): simplex size tolerance in log-space

    Returns:
        Tuple[HawkesParams, HawkesFitDiagnostics]: best parameters and diagnostics;
            ``converged`` is False when no start met the tolerance

    Raises:
        InsufficientDataError: fewer than 10 events
    """
    events = _validated(events, T, origin)
    if len(events) < MIN_FIT_EVENTS:
        raise InsufficientDataError(
            f"Hawkes fit needs at least {MIN_FIT_EVENTS} events, got {len(events)}"
        )

    if init_grid is None:
        init_grid = default_init_grid(moment_seed(events, T, origin))
    assert len(init_grid) > 0, "``init_grid`` must not be empty."

    def objective(log_theta: np.ndarray) -> float:
        mu, alpha, beta = np.exp(np.clip(log_theta, -LOG_BOUND, LOG_BOUND))
        value = -exp_log_likelihood(events, origin, T, mu, alpha, beta)
        return value if np.isfinite(value) else PENALTY

    best = None
    for start in init_grid:
        x0 = np.log(np.maximum(start.to_array(), np.exp(-LOG_BOUND)))
        result = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": max_iterations, "xatol": xatol, "fatol": np.inf},
        )
        logger.debug(
            f"start {start.to_array()} -> loglik {-result.fun:.6f} "
            f"after {result.nit} iteration(s), success={result.success}"
        )
        if best is None or result.fun < best.fun:
            best = result

    params = HawkesParams.from_array(np.exp(np.clip(best.x, -LOG_BOUND, LOG_BOUND)))
    diagnostics = HawkesFitDiagnostics(
        loglik=float(-best.fun),
        iterations=int(best.nit),
        converged=bool(best.success),
        branching_ratio=params.branching_ratio,
        n_events=int(len(events)),
        horizon=float(T - origin),
        starts=len(init_grid),
        message=str(best.message),
    )

    if params.branching_ratio >= 1.0:
        logger.warning(
            f"fitted branching ratio {params.branching_ratio:.3f} >= 1, "
            f"the process is not stationary"
        )
    if not diagnostics.converged:
        logger.warning(f"Hawkes fit did not converge: {diagnostics.message}")

    logger.info(
        f"Hawkes fit on {len(events)} event(s): mu={params.mu:.6g}, "
        f"alpha={params.alpha:.6g}, beta={params.beta:.6g}, loglik={diagnostics.loglik:.6f}"
    )
    return params, diagnostics
