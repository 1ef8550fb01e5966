"""Delimited-table ingestion and JSON run reports.

``load_table`` reads comma- or whitespace-separated text with a header
row.  Files written by R's ``write.table`` style (a leading row-index
column not named in the header) are detected and the index dropped.
A row filter of the form (column, value) compares raw tokens, which is
how a train/test indicator column is honored; the filter column is
removed afterwards since it is not numeric data.

Reports are plain JSON with a fixed key order, so a rerun with the
same seed and worker count produces byte-identical files.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .linmodel import Dataset


class TableFormatError(ValueError):
    """A delimited input file could not be parsed into a dataset."""


def _split_rows(text: str, path: str) -> list[tuple[int, list[str]]]:
    """(line number, fields) for every nonblank line."""
    first = text.splitlines()[0] if text else ""
    rows: list[tuple[int, list[str]]] = []
    if "," in first:
        reader = csv.reader(text.splitlines())
        for lineno, fields in enumerate(reader, start=1):
            if fields and any(f.strip() for f in fields):
                rows.append((lineno, [f.strip() for f in fields]))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            if line.strip():
                rows.append((lineno, line.split()))
    if len(rows) < 2:
        raise TableFormatError(f"{path}: need a header row and at least one data row")
    return rows


def load_table(path, response: str, drop=(), row_filter=None) -> Dataset:
    """Read a delimited text table into a dataset.

    Args:
        path: Comma- or whitespace-separated file with a header row.
        response: Name of the response column.
        drop: Column names to discard.
        row_filter: Optional (column, value) pair; keeps rows whose raw
            token in that column equals the value, then drops the
            column.

    Raises:
        TableFormatError: For ragged rows, non-numeric cells (with the
            offending line number), or missing columns.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    rows = _split_rows(text, str(path))

    header_line, header = rows[0]
    if header and header[0] == "":
        header = header[1:]
    if len(set(header)) != len(header):
        raise TableFormatError(f"{path}: duplicate column names in header")
    data = rows[1:]

    widths = {len(fields) for _, fields in data}
    expected = len(header) + 1 if len(header) + 1 in widths else len(header)
    if widths != {expected}:
        bad = next(ln for ln, fields in data if len(fields) != expected)
        raise TableFormatError(
            f"{path}: line {bad}: ragged row ({len(header)} columns in header)"
        )
    if expected == len(header) + 1:
        data = [(lineno, fields[1:]) for lineno, fields in data]

    columns = {name: i for i, name in enumerate(header)}
    if response not in columns:
        raise TableFormatError(f"{path}: response column {response!r} not found")
    for name in drop:
        if name not in columns:
            raise TableFormatError(f"{path}: column to drop {name!r} not found")

    removed = set(drop)
    if row_filter is not None:
        fcol, fval = row_filter
        if fcol not in columns:
            raise TableFormatError(f"{path}: filter column {fcol!r} not found")
        data = [(lineno, f) for lineno, f in data if f[columns[fcol]] == fval]
        if not data:
            raise TableFormatError(f"{path}: no rows match {fcol}={fval}")
        removed.add(fcol)

    def parse(lineno: int, name: str, token: str) -> float:
        try:
            return float(token)
        except ValueError:
            raise TableFormatError(
                f"{path}: line {lineno}: non-numeric value {token!r} "
                f"in column {name!r}"
            ) from None

    predictors = [
        name for name in header if name != response and name not in removed
    ]
    if not predictors:
        raise TableFormatError(f"{path}: no predictor columns remain")
    y = np.array([parse(ln, response, f[columns[response]]) for ln, f in data])
    X = np.array(
        [[parse(ln, nm, f[columns[nm]]) for nm in predictors] for ln, f in data]
    )
    return Dataset(y, X, tuple(predictors))


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_text(report: dict) -> str:
    """Serialize a report dict to deterministic JSON text."""
    return json.dumps(_jsonable(report), indent=2, allow_nan=True) + "\n"


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_text(report))
