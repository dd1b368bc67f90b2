"""Plain-text vector and matrix files used by the command line.

A vector file holds decimal numbers separated by any whitespace. A matrix
file holds one row per line, entries separated by commas or whitespace.
Writers emit 17 significant digits so that reading back is exact.
"""

import re

import numpy as np

from .exceptions import DimensionError

_SPLIT = re.compile(r"[,\s]+")


def _parse_numbers(text, where):
    tokens = [t for t in _SPLIT.split(text.strip()) if t]
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ValueError(f"{where}: {exc}") from None


def read_vector(path):
    with open(path) as fh:
        text = fh.read()
    if "," in text:
        raise ValueError(f"{path}: vector entries must be whitespace-separated")
    values = _parse_numbers(text, path)
    if not values:
        raise ValueError(f"{path}: no numbers found")
    return np.array(values)


def read_matrix(path):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                rows.append(_parse_numbers(line, f"{path}:{lineno}"))
    if not rows:
        raise ValueError(f"{path}: no rows found")
    if any(len(r) != len(rows[0]) for r in rows):
        raise DimensionError(f"{path}: rows have unequal lengths")
    return np.array(rows)


def format_float(value):
    return format(float(value), ".17g")


def write_vector(path, values):
    with open(path, "w") as fh:
        fh.write("\n".join(format_float(v) for v in np.ravel(values)) + "\n")


def write_matrix(path, matrix):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w") as fh:
        for row in matrix:
            fh.write(" ".join(format_float(v) for v in row) + "\n")
