# Copyright 2024 The tickcast Authors.
"""Exception types raised by tickcast."""

__all__ = [
    "LobFormatError",
    "LobRowError",
    "DomainError",
    "EmptySeriesError",
    "InsufficientDataError",
    "HistoryOrderError",
    "SingularSystemError",
    "UnstableModelError",
    "TuningError",
    "ScenarioError",
]


class LobFormatError(ValueError):
    """The LOB file cannot be read at all (missing column, empty file)."""


class LobRowError(ValueError):
    """
    A single LOB record is malformed.

    Args:
        line_number (int): 1-based line number in the source file (header is line 1)
        message (str): what is wrong with the row
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DomainError(ValueError):
    """A value lies outside the domain of the formula (e.g. a non-positive price)."""


class EmptySeriesError(ValueError):
    """Too few non-zero-return events survive extraction."""


class InsufficientDataError(ValueError):
    """An estimator refuses to run on fewer samples than it needs."""


class HistoryOrderError(ValueError):
    """Time-ordered input is not ordered, or a query lies before the known history."""


class SingularSystemError(RuntimeError):
    """Normal equations stay singular after regularization."""


class UnstableModelError(RuntimeError):
    """No stable denominator could be identified."""


class TuningError(RuntimeError):
    """Every hyperparameter candidate failed."""


class ScenarioError(RuntimeError):
    """
    Failure of one stage of a backtest scenario.

    Args:
        stage (str): stage tag, e.g. ``hawkes_fit`` or ``coe_fit``
        message (str): description of the failure
    """

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
