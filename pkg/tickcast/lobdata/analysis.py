# Copyright 2024 The tickcast Authors.

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
import pandas as pd
from scipy import stats

from tickcast.errors import InsufficientDataError
from tickcast.lobdata.features import EventSeries
from tickcast.lobdata.snapshots import LobBook

__all__ = ["DecileTable", "decile_correlation", "daily_ohlc", "dataset_summary"]

DECILES = 10


@dataclass(frozen=True)
class DecileTable:
    """Per-decile means of base imbalance and return, with their Pearson correlation."""

    mean_bi: np.ndarray
    mean_return: np.ndarray
    counts: np.ndarray
    rho: float

    def rows(self):
        for i in range(len(self.counts)):
            yield i + 1, int(self.counts[i]), float(self.mean_bi[i]), float(self.mean_return[i])


def decile_correlation(series: EventSeries) -> DecileTable:
    """
    Decile Pearson correlation between base imbalance and return.

    Events are sorted by return and split into ten groups of (nearly) equal size;
    the correlation is taken over the ten pairs of group means.

    Raises:
        InsufficientDataError: fewer than ten events, or constant decile means
            (the correlation is undefined)
    """
    if len(series) < DECILES:
        raise InsufficientDataError(
            f"decile analysis needs at least {DECILES} events, got {len(series)}"
        )

    order = np.argsort(series.returns, kind="mergesort")
    groups = np.array_split(order, DECILES)
    mean_bi = np.array([series.base_imbalances[g].mean() for g in groups])
    mean_return = np.array([series.returns[g].mean() for g in groups])
    counts = np.array([len(g) for g in groups])

    if np.ptp(mean_bi) == 0 or np.ptp(mean_return) == 0:
        raise InsufficientDataError("decile means are constant, so their correlation is undefined")

    rho = stats.pearsonr(mean_bi, mean_return)[0]
    return DecileTable(mean_bi=mean_bi, mean_return=mean_return, counts=counts, rho=float(rho))


def daily_ohlc(book: LobBook) -> pd.DataFrame:
    """
    Day-by-day open/high/low/close of the mid-price (UTC days).

    Returns:
        pd.DataFrame: columns ``day, open, high, low, close``; days without
            records are omitted
    """
    index = pd.to_datetime(book.timestamps, unit="s", utc=True)
    mids = pd.Series(book.mid_prices, index=index)
    ohlc = mids.resample("1D").ohlc().dropna()
    ohlc.insert(0, "day", ohlc.index.strftime("%Y-%m-%d"))
    return ohlc.reset_index(drop=True)


def dataset_summary(book: LobBook, series: Optional[EventSeries] = None) -> Dict[str, float]:
    """
    Record counts and event-gap statistics.

    Args:
        book (LobBook): all records
        series (Optional[EventSeries]): extracted events, when extraction succeeded

    Returns:
        Dict[str, float]: ``records``, ``zero_return_fraction``, ``retained_events``
            and, with a series, inter-event gap statistics plus the fraction of
            gaps of one minute or more
    """
    mids = book.mid_prices
    raw_changes = np.diff(mids)
    summary = {
        "records": float(len(book)),
        "zero_return_fraction": float(np.mean(raw_changes == 0)) if len(raw_changes) else 1.0,
        "crossed_dropped": float(book.crossed_dropped),
        "duplicates_collapsed": float(book.duplicates_collapsed),
        "start": float(book.timestamps[0]) if len(book) else float("nan"),
        "end": float(book.timestamps[-1]) if len(book) else float("nan"),
    }
    if series is None or len(series) < 2:
        summary["retained_events"] = float(len(series)) if series is not None else 0.0
        return summary

    gaps = np.diff(series.times)
    summary.update(
        {
            "retained_events": float(len(series)),
            "gap_min": float(gaps.min()),
            "gap_median": float(np.median(gaps)),
            "gap_mean": float(gaps.mean()),
            "gap_max": float(gaps.max()),
            "gap_minute_fraction": float(np.mean(gaps >= 60.0)),
        }
    )
    return summary
