"""CSV ingestion and tabular output."""

import csv
import io
import math
import os

import numpy as np

from ..estimators import Dataset
from ..exceptions import NonNumericValue, SchemaMismatch

DEFAULT_DIGITS = 6


def _read_table(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaMismatch(None, f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    return header, [r for r in rows[1:] if any(cell.strip() for cell in r)]


def _numeric(rows, header, columns, path):
    index = {name: i for i, name in enumerate(header)}
    out = np.empty((len(rows), len(columns)))
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise SchemaMismatch(None, f"{path}: data row {r} has {len(row)} fields, "
                                       f"header has {len(header)}")
        for c, name in enumerate(columns):
            cell = row[index[name]].strip()
            try:
                value = float(cell)
            except ValueError:
                raise NonNumericValue(r, name, cell) from None
            if not math.isfinite(value):
                raise NonNumericValue(r, name, cell)
            out[r - 1, c] = value
    return out


def ingest_csv(path_source, path_target, response_column):
    """Read aligned source and target datasets.

    Both files need a header row with the same feature columns plus the
    response column; features are ordered as in the source header.  Rows in
    :class:`NonNumericValue` errors are 1-based data rows (header excluded).

    Returns
    -------
    source, target : Dataset
    """
    h_src, rows_src = _read_table(path_source)
    h_tgt, rows_tgt = _read_table(path_target)
    for header, path in ((h_src, path_source), (h_tgt, path_target)):
        if response_column not in header:
            raise SchemaMismatch(response_column, f"{path} lacks response column "
                                                  f"{response_column!r}")
        if len(set(header)) != len(header):
            raise SchemaMismatch(None, f"{path} has duplicate column names")
    features = [h for h in h_src if h != response_column]
    target_features = [h for h in h_tgt if h != response_column]
    for name in features:
        if name not in target_features:
            raise SchemaMismatch(name, f"column {name!r} missing from {path_target}")
    for name in target_features:
        if name not in features:
            raise SchemaMismatch(name, f"column {name!r} missing from {path_source}")

    src = _numeric(rows_src, h_src, features + [response_column], path_source)
    tgt = _numeric(rows_tgt, h_tgt, features + [response_column], path_target)
    return Dataset(src[:, :-1], src[:, -1]), Dataset(tgt[:, :-1], tgt[:, -1])


def feature_names(path, response_column):
    header, _ = _read_table(path)
    return [h for h in header if h != response_column]


def format_number(value, digits=DEFAULT_DIGITS):
    """``digits`` significant digits; ``None`` gives the shortest round-trip repr."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if digits is None:
        return repr(value)
    return f"{value:.{digits}g}"


def to_csv(header, rows, digits=DEFAULT_DIGITS):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v, digits) for v in row])
    return buf.getvalue()
