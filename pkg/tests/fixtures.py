# Copyright 2024 The tickcast Authors.
"""Small builders shared by the tests."""

from typing import Optional, Sequence

import numpy as np

from tickcast.lobdata.features import EventSeries
from tickcast.lobdata.scenarios import ScenarioSettings
from tickcast.lobdata.snapshots import LobBook, LobSnapshot
from tickcast.synthetic import SyntheticConfig, generate_dataset

# synthetic Hawkes events are denser than real ones; only the span checks stay on
RELAXED = ScenarioSettings(min_gap=0.0, max_mean_max_gap=1e9, gap_window=60.0)


def snapshot(
    timestamp: float,
    ask_prices: Sequence[float],
    bid_prices: Sequence[float],
    size: float = 1.0,
) -> LobSnapshot:
    return LobSnapshot(
        timestamp=float(timestamp),
        ask_prices=np.asarray(ask_prices, dtype=np.float64),
        ask_sizes=np.full(len(ask_prices), size),
        bid_prices=np.asarray(bid_prices, dtype=np.float64),
        bid_sizes=np.full(len(bid_prices), size),
    )


def make_book(
    mids: Sequence[float],
    times: Optional[Sequence[float]] = None,
    levels: int = 10,
    tick: float = 1e-4,
    bi: Optional[Sequence[float]] = None,
    depth: int = 8,
) -> LobBook:
    """
    Book with the given mid-prices; ``bi`` realizes base imbalances at ``depth``.
    """
    mids = np.asarray(mids, dtype=np.float64)
    n = len(mids)
    times = np.arange(n, dtype=np.float64) if times is None else np.asarray(times, dtype=np.float64)
    bi = np.zeros(n) if bi is None else np.asarray(bi, dtype=np.float64)

    width = tick * (depth - 1) * 2
    d_bid = width * (1.0 + bi) / 2.0
    d_ask = width * (1.0 - bi) / 2.0
    inner = np.minimum(np.arange(levels), depth - 1) / (depth - 1)
    outer = np.maximum(np.arange(levels) - (depth - 1), 0) * tick

    ask = (mids + tick / 2)[:, None] + d_ask[:, None] * inner[None, :] + outer[None, :]
    bid = (mids - tick / 2)[:, None] - d_bid[:, None] * inner[None, :] - outer[None, :]
    return LobBook(times, ask, np.ones((n, levels)), bid, np.ones((n, levels)))


def make_series(
    times: Sequence[float],
    returns: Optional[Sequence[float]] = None,
    bi: Optional[Sequence[float]] = None,
) -> EventSeries:
    times = np.asarray(times, dtype=np.float64)
    n = len(times)
    returns = np.full(n, 1e-4) if returns is None else np.asarray(returns, dtype=np.float64)
    bi = np.zeros(n) if bi is None else np.asarray(bi, dtype=np.float64)
    prices = np.cumprod(np.concatenate(([1.0], 1.0 + returns[:-1])))
    return EventSeries(times=times, mid_prices=prices, returns=returns, base_imbalances=bi)


def synthetic(duration: float = 3 * 3600.0, seed: int = 0, **kwargs):
    """``(book, truth)`` of a synthetic dataset."""
    return generate_dataset(SyntheticConfig(duration=duration, seed=seed, **kwargs))


def one_second(duration: float = 2 * 3600.0, seed: int = 0, **kwargs):
    """``(book, truth)`` on a whole-second grid that the default scenario limits accept."""
    return generate_dataset(SyntheticConfig.from_preset("one-second", duration=duration, seed=seed, **kwargs))
