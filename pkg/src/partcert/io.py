"""CSV and JSON interchange.

Headers are mandatory and exact: ``id,loss`` for losses, ``id,f1,...,fd`` for
features, ``id,cell`` for assignments.  Files are UTF-8 with dot decimals;
parse failures report the file and line number.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .bounds import BoundReport, SampleTable
from .errors import CsvFormatError
from .partition import Assignment, Centroids, FeatureTable


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        yield from csv.reader(fh)


def _parse_float(path, lineno, text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise CsvFormatError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not math.isfinite(val):
        raise CsvFormatError(f"{path}:{lineno}: non-finite value: {text!r}")
    return val


def read_losses(path) -> SampleTable:
    rows = _rows(path)
    header = next(rows, None)
    if header != ["id", "loss"]:
        raise CsvFormatError(f"{path}:1: header must be exactly 'id,loss'")
    ids, losses = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise CsvFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        ids.append(row[0])
        losses.append(_parse_float(path, lineno, row[1]))
    return SampleTable(ids=tuple(ids), losses=np.asarray(losses, dtype=np.float64))


def read_features(path) -> FeatureTable:
    rows = _rows(path)
    header = next(rows, None)
    if (
        header is None
        or len(header) < 2
        or header[0] != "id"
        or header[1:] != [f"f{j}" for j in range(1, len(header))]
    ):
        raise CsvFormatError(f"{path}:1: header must be exactly 'id,f1,...,fd'")
    d = len(header) - 1
    ids, vectors = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != d + 1:
            raise CsvFormatError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        ids.append(row[0])
        vectors.append([_parse_float(path, lineno, v) for v in row[1:]])
    return FeatureTable(
        ids=tuple(ids),
        vectors=np.asarray(vectors, dtype=np.float64).reshape(len(ids), d),
    )


def read_assignments(path) -> Assignment:
    rows = _rows(path)
    header = next(rows, None)
    if header != ["id", "cell"]:
        raise CsvFormatError(f"{path}:1: header must be exactly 'id,cell'")
    ids, cells = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise CsvFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        ids.append(row[0])
        try:
            cells.append(int(row[1]))
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: not an integer cell: {row[1]!r}") from None
    return Assignment(ids=tuple(ids), cells=np.asarray(cells, dtype=np.int64))


def write_losses(path, table: SampleTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "loss"])
        for sid, loss in zip(table.ids, table.losses):
            w.writerow([sid, repr(float(loss))])


def write_features(path, table: FeatureTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"f{j}" for j in range(1, table.vectors.shape[1] + 1)])
        for sid, vec in zip(table.ids, table.vectors):
            w.writerow([sid] + [repr(float(v)) for v in vec])


def write_assignments(path, assignment: Assignment) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "cell"])
        for sid, cell in zip(assignment.ids, assignment.cells):
            w.writerow([sid, int(cell)])


def write_centroids(path, centroids: Centroids) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["cell"] + [f"c{j}" for j in range(1, centroids.centers.shape[1] + 1)])
        for i, row in enumerate(centroids.centers):
            w.writerow([i] + [repr(float(v)) for v in row])


def read_centroids(path) -> np.ndarray:
    rows = _rows(path)
    header = next(rows, None)
    if (
        header is None
        or len(header) < 2
        or header[0] != "cell"
        or header[1:] != [f"c{j}" for j in range(1, len(header))]
    ):
        raise CsvFormatError(f"{path}:1: header must be exactly 'cell,c1,...,cd'")
    d = len(header) - 1
    centers = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != d + 1:
            raise CsvFormatError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        centers.append([_parse_float(path, lineno, v) for v in row[1:]])
    return np.asarray(centers, dtype=np.float64).reshape(len(centers), d)


def write_grid_csv(path, rows) -> None:
    """Grid-search table: K,alpha,gamma,u_hat,g,unc,bound,valid."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["K", "alpha", "gamma", "u_hat", "g", "unc", "bound", "valid"])
        for r in rows:
            def fmt(v):
                return "" if v is None else repr(float(v))
            w.writerow([
                r.k, repr(float(r.alpha)), repr(float(r.gamma)),
                fmt(r.u_hat), fmt(r.g_val), fmt(r.unc), fmt(r.bound),
                "true" if r.valid else "false",
            ])


def write_checks_csv(path, results) -> None:
    """Verification-suite report: check,params,estimate,bound,margin,pass."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "params", "estimate", "bound", "margin", "pass"])
        for r in results:
            w.writerow([
                r.check, r.params, repr(r.estimate), repr(r.bound),
                repr(r.margin), "true" if r.passed else "false",
            ])


def write_report_json(path, report: BoundReport, seeds: dict | None = None) -> None:
    payload = report.to_dict(seeds)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
