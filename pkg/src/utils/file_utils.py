"""
File utilities for nhqsim: directories, JSON and atomic tabular output.
"""
import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

from config.settings import OUTPUT_PRECISION


def ensure_directory(path: Path) -> Path:
    """Ensure directory exists, creating it if necessary."""
    path.mkdir(parents=True, exist_ok=True)
    return path


def atomic_write_text(text: str, filepath: Path) -> None:
    """Write to a temporary file next to ``filepath`` and rename it into place."""
    filepath = Path(filepath)
    ensure_directory(filepath.parent)
    fd, tmp_name = tempfile.mkstemp(dir=filepath.parent, prefix=f".{filepath.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, filepath)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def save_json(data: Dict[str, Any], filepath: Path) -> None:
    """Save data as JSON file."""
    atomic_write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", filepath)


def load_json(filepath: Path) -> Dict[str, Any]:
    """Load data from JSON file."""
    with open(filepath, "r", encoding="utf-8") as f:
        return json.load(f)


def format_value(value: Any, precision: int = OUTPUT_PRECISION) -> str:
    """Fixed-precision text for one table cell; None and NaN become blanks."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)) or hasattr(value, "dtype"):
        value = float(value)
        if math.isnan(value):
            return ""
        return format(value, f".{precision}g")
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], filepath: Path,
              precision: Optional[int] = None) -> Path:
    """Write a comma-separated table with a single header row, atomically."""
    precision = precision or OUTPUT_PRECISION
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_value(v, precision) for v in row])
    atomic_write_text(buffer.getvalue(), filepath)
    return Path(filepath)


def read_csv(filepath: Path) -> Dict[str, list]:
    """Read a table written by write_csv into columns of floats (blank -> None)."""
    with open(filepath, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        columns: Dict[str, list] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                try:
                    columns[name].append(float(cell) if cell != "" else None)
                except ValueError:
                    columns[name].append(cell)
    return columns
