"""Small shared helpers: schema-checked CSV access, hashing, deterministic output."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path


class SchemaError(ValueError):
    """Raised when an input file does not match its declared schema."""


def fmt_float(x: float) -> str:
    # repr() is the shortest round-trip representation, stable across runs
    return repr(float(x))


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_csv_rows(path: str | Path, columns: list[str]) -> list[dict[str, str]]:
    """Read a delimited file, insisting on an exact header.

    Every schema problem is reported with a 1-based line number so CLI users
    can locate it in the file.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: line 1: empty file, expected header {columns}")
        if header != columns:
            missing = [c for c in columns if c not in header]
            extra = [c for c in header if c not in columns]
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unexpected {extra}")
            if not detail:
                detail.append(f"wrong order {header}")
            raise SchemaError(f"{path}: line 1: bad header ({'; '.join(detail)}), expected {columns}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(columns)} fields, got {len(row)}"
                )
            rows.append(dict(zip(columns, row)))
    return rows


def parse_float(value: str, path: str | Path, lineno_hint: str, field: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise SchemaError(f"{path}: {lineno_hint}: field '{field}' is not a number: {value!r}")
    return x


def write_csv(path: str | Path, columns: list[str], rows: list[list]) -> None:
    """Write rows with a fixed header. Floats go through fmt_float for determinism."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
