"""
Table Output Utilities

Shared serialization for every command: CSV with round-trip float precision
or JSON as a list of records, to a file or to stdout.
"""

import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config.settings import Output
from utils.errors import ConfigError


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def to_records(df: pd.DataFrame) -> list[dict]:
    """DataFrame rows as plain dicts, NaN mapped to None."""
    return df.astype(object).where(df.notna(), None).to_dict(orient="records")


def render_table(df: pd.DataFrame, fmt: str = "csv") -> str:
    """
    Render a table as text.

    Args:
        df: Table to render
        fmt: "csv" (floats as %.17g) or "json" (list of records)

    Raises:
        ConfigError: If the format is unknown
    """
    if fmt == "csv":
        return df.to_csv(index=False, float_format=Output.FLOAT_FORMAT, lineterminator="\n")
    if fmt == "json":
        # json.dumps writes the shortest repr that round-trips; pandas.to_json caps at 15 digits
        return json.dumps(to_records(df), default=_to_builtin, indent=1) + "\n"
    raise ConfigError(f"unknown output format '{fmt}', expected one of {Output.FORMATS}")


def write_table(df: pd.DataFrame, path: Optional[Path] = None, fmt: str = "csv",
                stdout: bool = False) -> Optional[Path]:
    """
    Write a table to `path` and/or stdout.

    Returns:
        Path written, or None when only stdout was used
    """
    text = render_table(df, fmt)
    if stdout:
        sys.stdout.write(text)
        sys.stdout.flush()
    if path is None:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding=Output.CSV_ENCODING)
    return path


def file_size_mb(path: Path) -> float:
    return Path(path).stat().st_size / 1024 / 1024
