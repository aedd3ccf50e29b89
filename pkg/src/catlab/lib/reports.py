"""
Report and artifact writers.

All files are written atomically: content goes to a temporary file in the
target directory which is then moved into place with ``os.replace``, so a
reader never sees a half-written report.
"""

import csv
import io
import json
import logging
import math
import os
import tempfile
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from catlab.lib.formatters import format_float

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays, tuples and non-finite floats to JSON values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``
    so the output stays strict JSON.

    Parameters
    ----------
    value : Any
        Value to convert.

    Returns
    -------
    Any
        JSON-serializable value.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Path):
        return value.as_posix()
    return value


def dumps_report(data: dict[str, Any]) -> str:
    """
    Serialize a report deterministically (sorted keys, shortest float repr).

    Parameters
    ----------
    data : dict
        Report content.

    Returns
    -------
    str
        JSON text ending in a newline.
    """
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_text_atomic(path: Path, text: str) -> Path:
    """
    Write text to ``path`` atomically.

    Parameters
    ----------
    path : Path
        Destination file.
    text : str
        File content.

    Returns
    -------
    Path
        The destination path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"Wrote {len(text):,} bytes to {path}")
    return path


def write_json(path: Path, data: dict[str, Any]) -> Path:
    """Write a JSON report atomically."""
    return write_text_atomic(path, dumps_report(data))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a CSV table atomically.

    Floats use the shortest round-trip representation.

    Parameters
    ----------
    path : Path
        Destination file.
    header : sequence of str
        Column names.
    rows : iterable of sequences
        Row values.

    Returns
    -------
    Path
        The destination path.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    return write_text_atomic(path, buffer.getvalue())


def read_json(path: Path) -> dict[str, Any]:
    """Load a JSON report."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)
