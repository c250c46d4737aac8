# Copyright 2024 The tickcast Authors.
"""
Synthetic LOB datasets with known event-time and return dynamics.

Event times follow a Hawkes process, base imbalances are drawn per event, and
returns come from a known COE system driven by the imbalance (or from a static
gain). Books are built so that their mid-prices compound those returns and
their depth ranges realize the imbalances.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from tickcast.coe.model import CoeParams, simulate_coe
from tickcast.hawkes.intensity import HawkesParams
from tickcast.hawkes.simulation import simulate_hawkes
from tickcast.lobdata.snapshots import LobBook

logger = logging.getLogger(__name__)

__all__ = ["PRESETS", "SyntheticConfig", "SyntheticTruth", "generate_dataset"]

RETURN_MODELS = ("coe", "static")
BI_LIMIT = 0.95

# ``continuous`` keeps raw Hawkes times; ``one-second`` snaps a faster flow to a
# whole-second grid, which the default scenario density limits accept
PRESETS: Dict[str, Dict[str, Any]] = {
    "continuous": {},
    "one-second": {"mu": 3.0, "alpha": 1.0, "beta": 2.0, "resolution": 1.0},
}


@dataclass
class SyntheticConfig:
    """
    Synthetic dataset settings.

    Args:
        duration (float): recorded span in seconds
        start (float): epoch seconds of the first possible record
        mu (float): Hawkes baseline intensity
        alpha (float): Hawkes excitation
        beta (float): Hawkes decay
        a (Tuple[float, ...]): COE denominator ``a_1 ... a_na``
        b (Tuple[float, ...]): COE numerator ``b_0 ... b_nb``
        noise_ratio (float): output noise std relative to the clean return std
        bi_persistence (float): AR(1) coefficient of the imbalance across events
        bi_scale (float): std of the imbalance before clipping to ``+-0.95``
        level_count (int): book levels ``L``
        depth (int): level at which the imbalance is realized
        initial_price (float): first mid-price
        spread (float): best ask minus best bid
        book_width (float): ``D_bid + D_ask`` at ``depth``
        return_model (str): ``coe`` or ``static``
        gain (float): ``R = gain * BI`` under the static model
        repeat_fraction (float): share of records that repeat the previous book
        resolution (Optional[float]): event times rounded to this grid when set
        burn_in (float): seconds simulated before ``start`` so the COE state is not zero
        seed (int): random seed
    """

    duration: float = 4 * 3600.0
    start: float = 1649980800.0
    mu: float = 0.5
    alpha: float = 0.8
    beta: float = 1.2
    a: Tuple[float, ...] = (3.0, 2.0)
    b: Tuple[float, ...] = (-2.0e-4, -4.0e-4)
    noise_ratio: float = 0.0
    bi_persistence: float = 0.0
    bi_scale: float = 0.5
    level_count: int = 10
    depth: int = 8
    initial_price: float = 1.0
    spread: float = 1.0e-4
    book_width: float = 2.0e-3
    return_model: str = "coe"
    gain: float = -1.0e-3
    repeat_fraction: float = 0.0
    resolution: Optional[float] = None
    burn_in: float = 60.0
    seed: int = 0

    def __post_init__(self):
        assert self.duration > 0, "``duration`` must be positive."
        assert self.return_model in RETURN_MODELS, (
            f"``return_model`` must be one of {list(RETURN_MODELS)}, but got {self.return_model}."
        )
        assert 2 <= self.depth <= self.level_count, "``depth`` must lie within [2, level_count]."
        assert 0 <= self.repeat_fraction < 1, "``repeat_fraction`` must lie within [0, 1)."
        assert -1 < self.bi_persistence < 1, "``bi_persistence`` must lie within (-1, 1)."
        assert self.noise_ratio >= 0, "``noise_ratio`` must not be negative."

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "SyntheticConfig":
        """Preset settings, with keyword overrides taking precedence."""
        assert name in PRESETS, f"Preset must be one of {list(PRESETS)}, but got {name}."
        return cls(**{**PRESETS[name], **overrides})

    @property
    def hawkes(self) -> HawkesParams:
        return HawkesParams(mu=self.mu, alpha=self.alpha, beta=self.beta)

    @property
    def coe(self) -> CoeParams:
        return CoeParams(a=self.a, b=self.b)


@dataclass
class SyntheticTruth:
    """Generating quantities at every event (the last event has no return)."""

    times: np.ndarray
    bi: np.ndarray
    returns: np.ndarray
    clean_returns: np.ndarray
    prices: np.ndarray
    hawkes: HawkesParams
    coe: Optional[CoeParams]


def _event_times(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    times, _ = simulate_hawkes(cfg.hawkes, cfg.start - cfg.burn_in, cfg.start + cfg.duration, rng)
    if cfg.resolution:
        times = np.unique(np.round(times / cfg.resolution) * cfg.resolution)
    return times


def _imbalances(cfg: SyntheticConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    shocks = rng.standard_normal(n) * cfg.bi_scale
    if cfg.bi_persistence == 0:
        return np.clip(shocks, -BI_LIMIT, BI_LIMIT)

    rho = cfg.bi_persistence
    bi = np.empty(n)
    prev = 0.0
    for k in range(n):
        prev = np.clip(rho * prev + np.sqrt(1 - rho ** 2) * shocks[k], -BI_LIMIT, BI_LIMIT)
        bi[k] = prev
    return bi


def _books(cfg: SyntheticConfig, prices: np.ndarray, bi: np.ndarray, rng: np.random.Generator):
    n, levels, depth = len(prices), cfg.level_count, cfg.depth
    d_bid = cfg.book_width * (1.0 + bi) / 2.0
    d_ask = cfg.book_width * (1.0 - bi) / 2.0

    offsets = np.arange(levels, dtype=np.float64)
    inner = np.minimum(offsets, depth - 1) / (depth - 1)
    outer = np.maximum(offsets - (depth - 1), 0) * cfg.book_width / (depth - 1)

    ask_1 = prices + cfg.spread / 2.0
    bid_1 = prices - cfg.spread / 2.0
    ask_prices = ask_1[:, None] + d_ask[:, None] * inner[None, :] + outer[None, :]
    bid_prices = bid_1[:, None] - d_bid[:, None] * inner[None, :] - outer[None, :]
    ask_sizes = rng.uniform(1.0, 10.0, size=(n, levels))
    bid_sizes = rng.uniform(1.0, 10.0, size=(n, levels))
    return ask_prices, ask_sizes, bid_prices, bid_sizes


def generate_dataset(cfg: SyntheticConfig) -> Tuple[LobBook, SyntheticTruth]:
    """
    Generate a synthetic LOB dataset.

    Args:
        cfg (SyntheticConfig): settings

    Returns:
        Tuple[LobBook, SyntheticTruth]: records (events plus repeated filler
            books) and the generating event quantities
    """
    rng = np.random.default_rng(cfg.seed)
    all_times = _event_times(cfg, rng)
    all_bi = _imbalances(cfg, len(all_times), rng)

    if cfg.return_model == "coe":
        clean, _ = simulate_coe(cfg.coe, all_times, all_bi)
    else:
        clean = cfg.gain * all_bi

    recorded = all_times >= cfg.start
    times, bi, clean = all_times[recorded], all_bi[recorded], clean[recorded]
    assert len(times) >= 3, "the synthetic span produced fewer than 3 events."

    noise_scale = cfg.noise_ratio * float(np.std(clean))
    returns = clean + noise_scale * rng.standard_normal(len(clean))

    prices = np.empty(len(times))
    prices[0] = cfg.initial_price
    for k in range(1, len(times)):
        prices[k] = prices[k - 1] * (1.0 + returns[k - 1])

    ask_prices, ask_sizes, bid_prices, bid_sizes = _books(cfg, prices, bi, rng)
    record_times = times
    source = np.arange(len(times))

    if cfg.repeat_fraction > 0:
        fillers = int(round(len(times) * cfg.repeat_fraction / (1.0 - cfg.repeat_fraction)))
        slots = rng.integers(0, len(times) - 1, size=fillers)
        filler_times = times[slots] + rng.uniform(0.05, 0.95, size=fillers) * np.diff(times)[slots]
        record_times = np.concatenate((times, filler_times))
        source = np.concatenate((source, slots))
        order = np.argsort(record_times, kind="mergesort")
        record_times, source = record_times[order], source[order]
        keep = np.append(np.diff(record_times) > 0, True)
        record_times, source = record_times[keep], source[keep]

    book = LobBook(
        timestamps=record_times,
        ask_prices=ask_prices[source],
        ask_sizes=ask_sizes[source],
        bid_prices=bid_prices[source],
        bid_sizes=bid_sizes[source],
    )
    truth = SyntheticTruth(
        times=times,
        bi=bi,
        returns=returns[:-1],
        clean_returns=clean[:-1],
        prices=prices,
        hawkes=cfg.hawkes,
        coe=cfg.coe if cfg.return_model == "coe" else None,
    )
    logger.info(
        f"generated {len(times)} event(s) and {len(book) - len(times)} repeated record(s) "
        f"over {cfg.duration:.0f} s"
    )
    return book, truth
