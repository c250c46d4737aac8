# Copyright 2024 The tickcast Authors.

import json
import os
import tempfile
from typing import Any, Iterable, List, Sequence

import numpy as np

__all__ = ["PathUtils", "CSV_FLOAT_FORMAT", "write_json", "write_csv_rows"]

# 17 significant digits round-trip every float64 exactly.
CSV_FLOAT_FORMAT = "%.17g"


class PathUtils(object):
    """
    Output path utils
    """

    @staticmethod
    def output_path(directory: str, name: str) -> str:
        """
        Make an output file path, creating the directory when needed.

        Args:
            directory (str): output directory
            name (str): file name

        Returns:
            str: joined path
        """
        os.makedirs(directory, exist_ok=True)
        return os.path.join(directory, name)

    @staticmethod
    def atomic_write(path: str, text: str) -> None:
        """
        Write text to ``path`` through a temporary file and a rename,
        so readers never observe a half-written file.

        Args:
            path (str): destination path
            text (str): file contents
        """
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise


def _to_builtin(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        # JSON has no inf/nan literal
        return None
    return value


def write_json(path: str, payload: Any) -> None:
    """Write ``payload`` as sorted-key JSON; floats keep full repr precision."""
    text = json.dumps(_to_builtin(payload), indent=2, sort_keys=True) + "\n"
    PathUtils.atomic_write(path, text)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return "nan"
        return CSV_FLOAT_FORMAT % value
    return str(value)


def write_csv_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """
    Write a comma-separated file with a header line.

    Args:
        path (str): destination path
        header (Sequence[str]): column names
        rows (Iterable[Sequence[Any]]): row values, floats formatted with ``%.17g``
    """
    lines: List[str] = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    PathUtils.atomic_write(path, "\n".join(lines) + "\n")
