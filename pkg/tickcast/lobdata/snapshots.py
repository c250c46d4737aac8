# Copyright 2024 The tickcast Authors.

import logging
import re
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np
import pandas as pd

from tickcast.errors import LobFormatError, LobRowError
from tickcast.io_utils import CSV_FLOAT_FORMAT, PathUtils

logger = logging.getLogger(__name__)

__all__ = [
    "LobSnapshot",
    "LobBook",
    "level_columns",
    "parse_lob_csv",
    "write_lob_csv",
]

TIMESTAMP_COLUMN = "timestamp"
LEVEL_FIELDS = ("ask_price", "ask_size", "bid_price", "bid_size")

# provider format "hh:mm:ss:fffffff" puts a colon in front of the fraction
_COLON_FRACTION = re.compile(r"^(.*\d{2}:\d{2}:\d{2}):(\d+)$")


@dataclass(frozen=True)
class LobSnapshot:
    """
    One timestamped limit-order-book record.

    Level ``1`` is the top of the book and sits at index ``0`` of every array.
    Ask prices increase with the level index, bid prices decrease.
    """

    timestamp: float
    ask_prices: np.ndarray
    ask_sizes: np.ndarray
    bid_prices: np.ndarray
    bid_sizes: np.ndarray

    @property
    def level_count(self) -> int:
        return int(len(self.ask_prices))


def level_columns(level_count: int) -> List[str]:
    """
    Column names of the LOB CSV schema for ``level_count`` levels.

    Examples:
        >>> level_columns(1)
        ['ask_price_1', 'ask_size_1', 'bid_price_1', 'bid_size_1']
    """
    columns = []
    for level in range(1, level_count + 1):
        columns.extend(f"{field}_{level}" for field in LEVEL_FIELDS)
    return columns


class LobBook(object):
    """
    Columnar container of LOB snapshots.

    Behaves as a read-only sequence of :class:`LobSnapshot`; the arrays stay
    stacked so features can be computed without touching Python objects.

    Args:
        timestamps (np.ndarray): shape ``(n,)``, seconds since epoch
        ask_prices (np.ndarray): shape ``(n, L)``
        ask_sizes (np.ndarray): shape ``(n, L)``
        bid_prices (np.ndarray): shape ``(n, L)``
        bid_sizes (np.ndarray): shape ``(n, L)``

    Attributes:
        crossed_dropped (int): crossed-book rows rejected at ingestion
        duplicates_collapsed (int): rows removed by the keep-last timestamp rule
    """

    def __init__(
        self,
        timestamps: np.ndarray,
        ask_prices: np.ndarray,
        ask_sizes: np.ndarray,
        bid_prices: np.ndarray,
        bid_sizes: np.ndarray,
        crossed_dropped: int = 0,
        duplicates_collapsed: int = 0,
    ):
        self.timestamps = np.asarray(timestamps, dtype=np.float64)
        self.ask_prices = np.atleast_2d(np.asarray(ask_prices, dtype=np.float64))
        self.ask_sizes = np.atleast_2d(np.asarray(ask_sizes, dtype=np.float64))
        self.bid_prices = np.atleast_2d(np.asarray(bid_prices, dtype=np.float64))
        self.bid_sizes = np.atleast_2d(np.asarray(bid_sizes, dtype=np.float64))

        shape = (len(self.timestamps), self.ask_prices.shape[1])
        for name in ("ask_prices", "ask_sizes", "bid_prices", "bid_sizes"):
            assert getattr(self, name).shape == shape, (
                f"``{name}`` must have shape {shape}, "
                f"but got {getattr(self, name).shape}."
            )

        self.crossed_dropped = crossed_dropped
        self.duplicates_collapsed = duplicates_collapsed

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[LobSnapshot]) -> "LobBook":
        """
        Stack a sequence of snapshots

        Args:
            snapshots (Sequence[LobSnapshot]): snapshots sharing one level count

        Returns:
            LobBook: stacked book
        """
        if isinstance(snapshots, LobBook):
            return snapshots

        assert len(snapshots) > 0, "can not build a book from zero snapshots."
        return cls(
            timestamps=np.array([s.timestamp for s in snapshots]),
            ask_prices=np.stack([s.ask_prices for s in snapshots]),
            ask_sizes=np.stack([s.ask_sizes for s in snapshots]),
            bid_prices=np.stack([s.bid_prices for s in snapshots]),
            bid_sizes=np.stack([s.bid_sizes for s in snapshots]),
        )

    @property
    def level_count(self) -> int:
        return int(self.ask_prices.shape[1])

    @property
    def mid_prices(self) -> np.ndarray:
        return (self.ask_prices[:, 0] + self.bid_prices[:, 0]) / 2.0

    def __len__(self) -> int:
        return int(len(self.timestamps))

    def __getitem__(self, idx: Union[int, slice]):
        if isinstance(idx, slice):
            return LobBook(
                self.timestamps[idx],
                self.ask_prices[idx],
                self.ask_sizes[idx],
                self.bid_prices[idx],
                self.bid_sizes[idx],
            )

        if idx < -len(self) or idx >= len(self):
            raise IndexError("index out of range")

        return LobSnapshot(
            timestamp=float(self.timestamps[idx]),
            ask_prices=self.ask_prices[idx].copy(),
            ask_sizes=self.ask_sizes[idx].copy(),
            bid_prices=self.bid_prices[idx].copy(),
            bid_sizes=self.bid_sizes[idx].copy(),
        )

    def to_frame(self) -> pd.DataFrame:
        """Flatten into the CSV column layout."""
        data = {TIMESTAMP_COLUMN: self.timestamps}
        for level in range(self.level_count):
            data[f"ask_price_{level + 1}"] = self.ask_prices[:, level]
            data[f"ask_size_{level + 1}"] = self.ask_sizes[:, level]
            data[f"bid_price_{level + 1}"] = self.bid_prices[:, level]
            data[f"bid_size_{level + 1}"] = self.bid_sizes[:, level]
        return pd.DataFrame(data, columns=[TIMESTAMP_COLUMN] + level_columns(self.level_count))


def _line_number(row_position: int) -> int:
    # header is line 1
    return int(row_position) + 2


def _to_float(value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        return np.nan


def _parse_timestamps(raw: pd.Series) -> np.ndarray:
    """
    Auto-detect epoch seconds or ISO-8601 timestamps.

    The first entry decides the format. Returns float seconds since epoch;
    unparsable entries become NaN.
    """
    try:
        return raw.astype(np.float64).to_numpy()
    except (TypeError, ValueError):
        pass

    if len(raw) > 0 and np.isfinite(_to_float(raw.iloc[0])):
        return np.array([_to_float(v) for v in raw], dtype=np.float64)

    text = raw.astype(str).str.strip().str.replace(_COLON_FRACTION, r"\1.\2", regex=True)
    parsed = pd.to_datetime(text, utc=True, errors="coerce")
    epoch = pd.Timestamp("1970-01-01", tz="UTC")
    seconds = (parsed - epoch) / pd.Timedelta(seconds=1)
    return seconds.to_numpy(dtype=np.float64, na_value=np.nan)


def _first_bad_row(mask: np.ndarray) -> int:
    return int(np.flatnonzero(mask)[0])


def parse_lob_csv(path: str, level_count: int) -> LobBook:
    """
    Read a LOB CSV file.

    Args:
        path (str): file path
        level_count (int): number of levels ``L`` to read; extra levels in the
            file are ignored

    Returns:
        LobBook: snapshots in timestamp order; duplicate timestamps collapsed
            keeping the last record, crossed books dropped

    Raises:
        LobFormatError: the file is empty or a required column is missing
        LobRowError: a row holds a missing/non-numeric value, a non-positive
            price or size, or non-monotone levels

    Notes:
        The header is ``timestamp,ask_price_1,ask_size_1,bid_price_1,bid_size_1,...``.
        Timestamps are epoch seconds or ISO-8601 with fractional seconds;
        the provider layout ``hh:mm:ss:fffffff`` is accepted too.
    """
    assert level_count >= 1, "``level_count`` must be positive."
    required = [TIMESTAMP_COLUMN] + level_columns(level_count)

    try:
        frame = pd.read_csv(
            path, dtype={TIMESTAMP_COLUMN: str}, skipinitialspace=True, float_precision="round_trip"
        )
    except pd.errors.EmptyDataError as e:
        raise LobFormatError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        if match is not None:
            raise LobRowError(int(match.group(1)), str(e)) from e
        raise LobFormatError(str(e)) from e

    missing = [c for c in required if c not in frame.columns]
    if len(missing) > 0:
        raise LobFormatError(f"{path} is missing required column(s): {', '.join(missing)}")

    timestamps = _parse_timestamps(frame[TIMESTAMP_COLUMN])
    bad = ~np.isfinite(timestamps)
    if bad.any():
        row = _first_bad_row(bad)
        raise LobRowError(
            _line_number(row), f"unparsable timestamp {frame[TIMESTAMP_COLUMN].iloc[row]!r}"
        )

    values = {}
    for column in required[1:]:
        converted = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(converted)
        if bad.any():
            row = _first_bad_row(bad)
            raise LobRowError(
                _line_number(row), f"column {column} holds {frame[column].iloc[row]!r}"
            )
        values[column] = converted

    def stacked(field: str) -> np.ndarray:
        return np.column_stack([values[f"{field}_{i}"] for i in range(1, level_count + 1)])

    ask_prices, ask_sizes = stacked("ask_price"), stacked("ask_size")
    bid_prices, bid_sizes = stacked("bid_price"), stacked("bid_size")

    checks = [
        ((ask_prices <= 0).any(axis=1) | (bid_prices <= 0).any(axis=1), "non-positive price"),
        ((ask_sizes <= 0).any(axis=1) | (bid_sizes <= 0).any(axis=1), "non-positive size"),
        ((np.diff(ask_prices, axis=1) <= 0).any(axis=1), "ask prices not increasing"),
        ((np.diff(bid_prices, axis=1) >= 0).any(axis=1), "bid prices not decreasing"),
    ]
    for mask, message in checks:
        if mask.any():
            raise LobRowError(_line_number(_first_bad_row(mask)), message)

    crossed = ask_prices[:, 0] < bid_prices[:, 0]
    crossed_dropped = int(crossed.sum())
    if crossed_dropped > 0:
        logger.warning(f"dropped {crossed_dropped} crossed-book row(s) from {path}")

    keep = ~crossed
    timestamps = timestamps[keep]
    ask_prices, ask_sizes = ask_prices[keep], ask_sizes[keep]
    bid_prices, bid_sizes = bid_prices[keep], bid_sizes[keep]

    # stable sort keeps file order among equal timestamps, so "last" is the later row
    order = np.argsort(timestamps, kind="mergesort")
    timestamps = timestamps[order]
    is_last = np.append(timestamps[1:] != timestamps[:-1], True)
    duplicates_collapsed = int((~is_last).sum())
    if duplicates_collapsed > 0:
        logger.warning(f"collapsed {duplicates_collapsed} duplicate timestamp row(s) in {path}")

    selected = order[is_last]
    book = LobBook(
        timestamps=timestamps[is_last],
        ask_prices=ask_prices[selected],
        ask_sizes=ask_sizes[selected],
        bid_prices=bid_prices[selected],
        bid_sizes=bid_sizes[selected],
        crossed_dropped=crossed_dropped,
        duplicates_collapsed=duplicates_collapsed,
    )
    logger.info(f"parsed {len(book)} snapshot(s) with {level_count} level(s) from {path}")
    return book


def write_lob_csv(path: str, snapshots: Union[LobBook, Sequence[LobSnapshot]]) -> None:
    """
    Write snapshots in the schema read by :func:`parse_lob_csv`.

    Args:
        path (str): destination path
        snapshots (Union[LobBook, Sequence[LobSnapshot]]): records to write

    Notes:
        Timestamps are written as epoch seconds and every float with 17
        significant digits, so ``parse_lob_csv(write_lob_csv(x))`` restores
        ``x`` exactly for valid, time-ordered input.
    """
    book = LobBook.from_snapshots(snapshots)
    text = book.to_frame().to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    PathUtils.atomic_write(path, text)
