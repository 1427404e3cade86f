"""Deterministic CSV/JSON writers shared by the pipeline stages.

Floats are rendered with ``repr`` (shortest round-trip form), so equal
inputs always produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import IoFailure


def format_float(x: float) -> str:
    return repr(float(x))


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    """Write a 2-D array as headerless CSV, one row per line."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [",".join(format_float(v) for v in row) for row in matrix]
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_matrix_csv(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    rows = [
        [float(tok) for tok in line.split(",")]
        for line in text.splitlines()
        if line.strip()
    ]
    return np.asarray(rows, dtype=float)


def write_json(path, obj) -> None:
    """Write JSON with sorted keys and a fixed layout (byte-deterministic)."""
    try:
        Path(path).write_text(
            json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
