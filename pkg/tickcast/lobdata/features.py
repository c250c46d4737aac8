# Copyright 2024 The tickcast Authors.

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from tickcast.errors import DomainError, EmptySeriesError
from tickcast.lobdata.snapshots import LobBook, LobSnapshot

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_DEPTH",
    "EventSeries",
    "mid_price",
    "compute_returns",
    "base_imbalance",
    "base_imbalances",
    "extract_events",
]

# tuned operating point; the textbook formula uses level 10
DEFAULT_DEPTH = 8


@dataclass(frozen=True)
class EventSeries:
    """
    Non-zero-return LOB events.

    ``returns[k]`` is the forward return from event ``k`` to the next retained
    event, so the last retained record (which has none) is not part of the series.

    Args:
        times (np.ndarray): strictly increasing event times in seconds
        mid_prices (np.ndarray): mid-price ``P_k`` at each event
        returns (np.ndarray): forward return ``R_k``, never zero
        base_imbalances (np.ndarray): ``BI_k`` in ``[-1, 1]``
    """

    times: np.ndarray
    mid_prices: np.ndarray
    returns: np.ndarray
    base_imbalances: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("mid_prices", "returns", "base_imbalances"):
            assert len(getattr(self, name)) == n, f"``{name}`` is not aligned with ``times``."

        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("event times must be strictly increasing.")
        if np.any(self.returns == 0):
            raise ValueError("an event series can not hold zero returns.")
        if np.any(np.abs(self.base_imbalances) > 1.0):
            raise ValueError("base imbalance must lie in [-1, 1].")

    def __len__(self) -> int:
        return int(len(self.times))

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def between(self, t_start: float, t_end: float) -> "EventSeries":
        """Events with ``t_start <= t_k <= t_end``."""
        lo = np.searchsorted(self.times, t_start, side="left")
        hi = np.searchsorted(self.times, t_end, side="right")
        return EventSeries(
            times=self.times[lo:hi],
            mid_prices=self.mid_prices[lo:hi],
            returns=self.returns[lo:hi],
            base_imbalances=self.base_imbalances[lo:hi],
        )

    def last_index_at_or_before(self, t: float) -> int:
        """Index of the last event with ``t_k <= t`` (``-1`` when there is none)."""
        return int(np.searchsorted(self.times, t, side="right")) - 1


def mid_price(s: LobSnapshot) -> float:
    """Mid-price ``(ask_1 + bid_1) / 2``."""
    return (float(s.ask_prices[0]) + float(s.bid_prices[0])) / 2.0


def compute_returns(prices: Sequence[float]) -> np.ndarray:
    """
    Forward returns ``R_k = (P_{k+1} - P_k) / P_k``.

    Args:
        prices (Sequence[float]): at least two prices

    Returns:
        np.ndarray: ``len(prices) - 1`` returns

    Raises:
        DomainError: when a price is not strictly positive
    """
    prices = np.asarray(prices, dtype=np.float64)
    assert prices.ndim == 1 and len(prices) >= 2, "``compute_returns`` needs at least 2 prices."

    if np.any(prices <= 0):
        raise DomainError(f"prices must be positive, got min {prices.min()!r}")

    return np.diff(prices) / prices[:-1]


def _imbalance(d_bid: np.ndarray, d_ask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    total = d_bid + d_ask
    degenerate = total <= 0
    safe_total = np.where(degenerate, 1.0, total)
    values = np.where(degenerate, 0.0, (d_bid - d_ask) / safe_total)
    return np.clip(values, -1.0, 1.0), degenerate


def base_imbalance(s: LobSnapshot, depth: int = DEFAULT_DEPTH) -> Tuple[float, bool]:
    """
    Base imbalance of one snapshot.

    With ``D_bid = bid_1 - bid_depth`` and ``D_ask = ask_depth - ask_1`` the value
    is ``(D_bid - D_ask) / (D_bid + D_ask)``.

    Args:
        s (LobSnapshot): snapshot
        depth (int): deepest level used, ``2 <= depth <= L``

    Returns:
        Tuple[float, bool]: the imbalance in ``[-1, 1]`` and a flag that is true
            when both depth ranges are zero (the value is then ``0``)
    """
    assert 2 <= depth <= s.level_count, (
        f"``depth`` must be within [2, {s.level_count}], but got {depth}."
    )
    d_bid = np.float64(s.bid_prices[0] - s.bid_prices[depth - 1])
    d_ask = np.float64(s.ask_prices[depth - 1] - s.ask_prices[0])
    value, degenerate = _imbalance(d_bid, d_ask)
    return float(value), bool(degenerate)


def base_imbalances(book: LobBook, depth: int = DEFAULT_DEPTH) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized :func:`base_imbalance` over a whole book.

    Returns:
        Tuple[np.ndarray, np.ndarray]: values and degeneracy mask
    """
    assert 2 <= depth <= book.level_count, (
        f"``depth`` must be within [2, {book.level_count}], but got {depth}."
    )
    d_bid = book.bid_prices[:, 0] - book.bid_prices[:, depth - 1]
    d_ask = book.ask_prices[:, depth - 1] - book.ask_prices[:, 0]
    return _imbalance(d_bid, d_ask)


def extract_events(
    snapshots: Union[LobBook, Sequence[LobSnapshot]],
    depth: int = DEFAULT_DEPTH,
) -> EventSeries:
    """
    Build the non-zero-return event series.

    A record is kept when its mid-price differs from the last kept record's,
    which is the same as a non-zero return against the previous retained event.

    Args:
        snapshots (Union[LobBook, Sequence[LobSnapshot]]): time-ordered snapshots
        depth (int): depth used for the base imbalance

    Returns:
        EventSeries: retained events with forward returns to the next retained event

    Raises:
        EmptySeriesError: fewer than 3 snapshots, or fewer than two records survive
    """
    book = LobBook.from_snapshots(snapshots)
    if len(book) < 3:
        raise EmptySeriesError(f"event extraction needs at least 3 snapshots, got {len(book)}")

    mids = book.mid_prices
    keep = np.ones(len(book), dtype=bool)
    keep[1:] = mids[1:] != mids[:-1]
    retained = np.flatnonzero(keep)

    if len(retained) < 2:
        raise EmptySeriesError(
            f"only {len(retained)} of {len(book)} record(s) change the mid-price"
        )

    bi, degenerate = base_imbalances(book, depth)
    if degenerate[retained].any():
        logger.warning(
            f"{int(degenerate[retained].sum())} retained event(s) have a degenerate "
            f"base imbalance at depth {depth}; using 0"
        )

    prices = mids[retained]
    returns = compute_returns(prices)
    head = retained[:-1]

    logger.info(
        f"retained {len(retained)} of {len(book)} record(s) "
        f"({len(retained) / len(book):.1%}) as non-zero-return events"
    )
    return EventSeries(
        times=book.timestamps[head],
        mid_prices=prices[:-1],
        returns=returns,
        base_imbalances=bi[head],
    )
