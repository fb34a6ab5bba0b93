"""CSV reading and writing.

Files are UTF-8, comma separated, with a header row. A column named
``truth`` holds ground-truth labels and is kept apart from the values.
Floats are written with 17 significant digits so a round trip is exact.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ParseError

TRUTH_COLUMN = "truth"
LABEL_COLUMN = "label"


@dataclass
class Dataset:
    values: np.ndarray
    columns: list
    truth: np.ndarray | None = None

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


def format_float(x):
    return format(float(x), ".17g")


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not valid UTF-8") from exc
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError(f"{path} is empty; a header row is required")
    return rows[0], rows[1:]


def _parse_cell(cell, row, col, name, path):
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(
            f"{path}: non-numeric value {cell!r} at row {row}, column {col} ({name})",
            row=row, column=col,
        ) from None
    if not np.isfinite(value):
        raise ParseError(f"{path}: non-finite value at row {row}, column {col} ({name})",
                         row=row, column=col)
    return value


def read_dataset(path):
    """Load a data CSV; rows are numbered from 1 for the first data line."""
    header, body = _read_rows(path)
    header = [h.strip() for h in header]
    truth_idx = [i for i, h in enumerate(header) if h.lower() == TRUTH_COLUMN]
    value_idx = [i for i in range(len(header)) if i not in truth_idx]
    values = np.empty((len(body), len(value_idx)))
    truth = np.empty(len(body), dtype=int) if truth_idx else None
    for r, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ParseError(
                f"{path}: row {r} has {len(row)} fields, header has {len(header)}", row=r
            )
        for out_j, j in enumerate(value_idx):
            values[r - 1, out_j] = _parse_cell(row[j], r, j + 1, header[j], path)
        if truth_idx:
            t = _parse_cell(row[truth_idx[0]], r, truth_idx[0] + 1, TRUTH_COLUMN, path)
            if t != int(t):
                raise ParseError(f"{path}: truth label {t} at row {r} is not an integer",
                                 row=r, column=truth_idx[0] + 1)
            truth[r - 1] = int(t)
    return Dataset(values, [header[j] for j in value_idx], truth)


def write_dataset(path, values, truth=None, columns=None):
    values = np.asarray(values, dtype=float)
    if columns is None:
        columns = [f"x{j + 1}" for j in range(values.shape[1])]
    header = list(columns) + ([TRUTH_COLUMN] if truth is not None else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, row in enumerate(values):
            cells = [format_float(v) for v in row]
            if truth is not None:
                cells.append(str(int(truth[i])))
            w.writerow(cells)


def read_labels(path, n=None):
    header, body = _read_rows(path)
    if [h.strip().lower() for h in header] != [LABEL_COLUMN]:
        raise ParseError(f"{path}: expected a single '{LABEL_COLUMN}' column")
    labels = []
    for r, row in enumerate(body, start=1):
        v = _parse_cell(row[0], r, 1, LABEL_COLUMN, path)
        if v != int(v) or v < 1:
            raise ParseError(f"{path}: label {v} at row {r} is not a positive integer",
                             row=r, column=1)
        labels.append(int(v))
    labels = np.array(labels, dtype=int)
    if n is not None and labels.shape[0] != n:
        raise AlignmentError(
            f"{path} has {labels.shape[0]} labels but the data have {n} rows"
        )
    return labels


def write_labels(path, labels):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([LABEL_COLUMN])
        for v in labels:
            w.writerow([int(v)])
