"""Dataset ingestion from CSV and svmlight/libsvm text files."""
from __future__ import annotations

import csv
import math

import numpy as np

from accelseed.core import Dataset, InvalidInputError

FORMATS = ("csv", "svmlight")


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _floats(fields, lineno):
    try:
        vals = [float(f) for f in fields]
    except ValueError:
        raise ParseError(f"non-numeric field in {fields!r}", lineno) from None
    if not all(math.isfinite(v) for v in vals):
        raise ParseError("NaN or Inf value", lineno)
    return vals


def load_csv(path, weights_column: str | int | None = None) -> Dataset:
    """One point per row. A first row that is not all-numeric is a header.

    ``weights_column`` is a header name or a 0-based column position; that
    column becomes the point weights and the rest are coordinates.
    """
    rows = []
    header = None
    width = None
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not f.strip() for f in rec):
                continue
            if header is None and not rows:
                try:
                    [float(f) for f in rec]
                except ValueError:
                    header = [f.strip() for f in rec]
                    width = len(header)
                    continue
            if width is None:
                width = len(rec)
            elif len(rec) != width:
                raise ParseError(f"expected {width} fields, got {len(rec)}", lineno)
            rows.append(_floats(rec, lineno))
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    if weights_column is None:
        return Dataset(data)
    col = _resolve_column(weights_column, header, width)
    coords = np.delete(data, col, axis=1)
    if coords.shape[1] == 0:
        raise InvalidInputError("no coordinate columns left besides the weights")
    return Dataset(coords, data[:, col])


def _resolve_column(column, header, width) -> int:
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        if header is None or column not in header:
            raise InvalidInputError(f"no column named {column!r}")
        return header.index(column)
    col = int(column)
    if not 0 <= col < width:
        raise InvalidInputError(f"weights column {col} out of range for {width} columns")
    return col


def load_svmlight(path) -> Dataset:
    """``label idx:val ...`` lines with 1-based indices; label ignored.

    Missing indices are zero and the dimension is the largest index seen in
    the file. ``qid:`` tokens and ``#`` comments are skipped.
    """
    rows = []
    dim = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            try:
                float(toks[0])
            except ValueError:
                raise ParseError(f"bad label {toks[0]!r}", lineno) from None
            feats = {}
            for tok in toks[1:]:
                key, sep, val = tok.partition(":")
                if not sep:
                    raise ParseError(f"expected idx:val, got {tok!r}", lineno)
                if key == "qid":
                    continue
                try:
                    idx = int(key)
                    v = float(val)
                except ValueError:
                    raise ParseError(f"bad feature {tok!r}", lineno) from None
                if idx < 1:
                    raise ParseError(f"feature index {idx} is not 1-based", lineno)
                if not math.isfinite(v):
                    raise ParseError("NaN or Inf value", lineno)
                feats[idx] = v
                dim = max(dim, idx)
            rows.append(feats)
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    if dim == 0:
        raise InvalidInputError(f"{path}: no features")
    X = np.zeros((len(rows), dim))
    for r, feats in enumerate(rows):
        for idx, v in feats.items():
            X[r, idx - 1] = v
    return Dataset(X)


def load_dataset(path, fmt: str = "csv", weights_column=None) -> Dataset:
    if fmt == "csv":
        return load_csv(path, weights_column)
    if fmt == "svmlight":
        if weights_column is not None:
            raise InvalidInputError("svmlight input carries no weight column")
        return load_svmlight(path)
    raise InvalidInputError(f"unknown format {fmt!r}")


def save_csv(dataset: Dataset, path, with_weights: bool = False) -> None:
    data = dataset.points
    if with_weights:
        data = np.column_stack([data, dataset.weights])
    np.savetxt(path, data, delimiter=",", fmt="%.17g")
