"""CSV ingestion and report writers."""
import csv
import json
import math
import os

from .errors import IngestionError
from .models import Dataset


def _is_number(text):
    try:
        v = float(text)
    except ValueError:
        return False
    return math.isfinite(v)


def ingest_csv(path, column=None, units=""):
    """Read one numeric column from a CSV file into a Dataset.

    A file with a single column may have a header or not. With ``column`` the
    first row must be a header naming it. Blank lines and lines starting with
    ``#`` are skipped; any other row whose value is missing or non-numeric is
    an error, reported with 1-based line numbers.
    """
    try:
        with open(path, newline="") as fh:
            lines = list(enumerate(csv.reader(fh), start=1))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc

    rows = [(ln, [c.strip() for c in r]) for ln, r in lines if r and any(c.strip() for c in r)]
    rows = [(ln, r) for ln, r in rows if not r[0].startswith("#")]
    if not rows:
        raise IngestionError(f"{path} is empty")

    first_line, first = rows[0]
    if column is not None:
        if column not in first:
            raise IngestionError(f"column {column!r} not found in header of {path} (line {first_line})", [first_line])
        idx = first.index(column)
        body = rows[1:]
    else:
        if len(first) > 1:
            raise IngestionError(f"{path} has {len(first)} columns; name one with column=", [first_line])
        idx = 0
        body = rows[1:] if not _is_number(first[0]) else rows

    values, bad_missing, bad_parse = [], [], []
    for ln, r in body:
        cell = r[idx] if idx < len(r) else ""
        if cell == "":
            bad_missing.append(ln)
        elif not _is_number(cell):
            bad_parse.append(ln)
        else:
            values.append(float(cell))
    if bad_missing or bad_parse:
        parts = []
        if bad_missing:
            parts.append(f"missing values on line(s) {bad_missing}")
        if bad_parse:
            parts.append(f"non-numeric values on line(s) {bad_parse}")
        raise IngestionError(f"{path}: " + "; ".join(parts), sorted(bad_missing + bad_parse))
    if not values:
        raise IngestionError(f"{path} has a header but no data rows")
    return Dataset(values, source=str(path), units=units)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def write_csv(path, fieldnames, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")
