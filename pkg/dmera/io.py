"""Result files: CSV tables and JSON-lines run logs"""

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_write_lock = threading.Lock()


def format_value(value) -> str:
    """Floats with 17 significant digits, everything else via str"""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(path: PathLike, rows: Iterable[dict], columns: Optional[Sequence[str]] = None) -> Path:
    """Write rows with a header; the header is written even when rows is empty"""
    rows = list(rows)
    if columns is None:
        if not rows:
            raise ValueError("columns are required when there are no rows")
        columns = list(rows[0].keys())
    path = Path(path)
    with _write_lock:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row[c]) for c in columns])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def read_csv(path: PathLike) -> List[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class RunLog:
    """Append-only JSON-lines log of optimisation progress"""

    def __init__(self, path: PathLike):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def write(self, **record) -> None:
        line = json.dumps({k: _jsonable(v) for k, v in record.items()})
        with self._lock, open(self.path, "a") as f:
            f.write(line + "\n")

    def read(self) -> List[dict]:
        if not self.path.exists():
            return []
        with open(self.path) as f:
            return [json.loads(line) for line in f if line.strip()]


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value
