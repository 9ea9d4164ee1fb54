"""Delimited-file ingestion with explicit NULL semantics.

A cell is NULL iff it is empty after trimming ASCII whitespace; placeholder
tokens such as ``-`` or ``nav`` are ordinary values and are handled by a
dedicated check, never conflated with NULL. Raw text is preserved exactly
as read so protocols and re-emission stay faithful to the input.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterator

from .checks import DateCheck, DateFormat, is_decimal_text, is_integer_text, parse_date
from .model import FieldType


class DatasetError(ValueError):
    """Unreadable, malformed, or structurally inconsistent input data."""


@dataclass(frozen=True)
class CellValue:
    raw: str
    is_null: bool
    coerced: object | None = None
    error: str | None = None  # coercion-failure marker consumed by the engine

    @classmethod
    def from_raw(cls, raw: str) -> "CellValue":
        return cls(raw=raw, is_null=raw.strip() == "")

    @property
    def trimmed(self) -> str:
        return self.raw.strip()


@dataclass(frozen=True)
class Record:
    row_index: int  # 1-based over data rows, header excluded
    cells: tuple[CellValue, ...]


class Dataset:
    """In-memory table. Rows are kept as raw strings; ``records`` builds
    CellValue views on demand (prefer ``iter_records`` for large files)."""

    def __init__(self, source_name: str, header: tuple[str, ...], rows: list[list[str]]):
        for i, row in enumerate(rows, 1):
            if len(row) != len(header):
                raise DatasetError(
                    f"{source_name}: row {i} has {len(row)} cells, expected {len(header)}"
                )
        self.source_name = source_name
        self.header = header
        self.rows = rows

    @property
    def record_count(self) -> int:
        return len(self.rows)

    def iter_records(self) -> Iterator[Record]:
        for i, row in enumerate(self.rows, 1):
            yield Record(row_index=i, cells=tuple(CellValue.from_raw(c) for c in row))

    @property
    def records(self) -> list[Record]:
        return list(self.iter_records())

    def column(self, name: str) -> list[str]:
        try:
            idx = self.header.index(name)
        except ValueError:
            raise DatasetError(f"{self.source_name}: no column named {name!r}") from None
        return [row[idx] for row in self.rows]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.header == other.header
            and self.rows == other.rows
        )


def read_csv(
    path: str | Path,
    delimiter: str = ",",
    has_header: bool = True,
    source_name: str | None = None,
) -> Dataset:
    """RFC 4180 read: quoted fields may hold delimiters, doubled quotes and
    line breaks; CRLF and LF both accepted; UTF-8 only."""
    path = Path(path)
    if len(delimiter) != 1:
        raise DatasetError(f"delimiter must be a single character, got {delimiter!r}")
    name = source_name or path.name
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(
            f"{name}: invalid UTF-8 at byte offset {exc.start}"
        ) from exc
    return read_csv_text(text, delimiter=delimiter, has_header=has_header, source_name=name)


def read_csv_text(
    text: str,
    delimiter: str = ",",
    has_header: bool = True,
    source_name: str = "<string>",
) -> Dataset:
    if text.startswith("﻿"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        parsed = list(reader)
    except csv.Error as exc:
        raise DatasetError(f"{source_name}: malformed CSV: {exc}") from exc
    if not parsed:
        raise DatasetError(f"{source_name}: file is empty")
    if has_header:
        header = tuple(parsed[0])
        rows = parsed[1:]
    else:
        width = len(parsed[0])
        header = tuple(f"col_{i}" for i in range(1, width + 1))
        rows = parsed
    for i, row in enumerate(rows, 1):
        if len(row) != len(header):
            raise DatasetError(
                f"{source_name}: row {i} has {len(row)} cells, expected {len(header)}"
            )
    return Dataset(source_name=source_name, header=header, rows=rows)


def to_csv(dataset: Dataset) -> str:
    """Quote-minimal RFC 4180 emission (CRLF line ends). Re-parsing the
    result yields an identical dataset."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(dataset.header)
    writer.writerows(dataset.rows)
    return buf.getvalue()


def coerce_cell(raw: str, ftype: FieldType) -> CellValue:
    """Coerce a raw cell to the declared type.

    Failure is data, not an exception: the returned cell carries an error
    marker instead of a coerced value. Digit-length checks elsewhere use the
    raw text, so leading zeros survive here untouched.
    """
    trimmed = raw.strip()
    if trimmed == "":
        return CellValue(raw=raw, is_null=True)
    kind = ftype.kind
    if kind == "text":
        return CellValue(raw=raw, is_null=False, coerced=trimmed)
    if kind == "integer":
        if is_integer_text(trimmed):
            return CellValue(raw=raw, is_null=False, coerced=int(trimmed))
        return CellValue(raw=raw, is_null=False, error="not_integer")
    if kind == "decimal":
        if is_decimal_text(trimmed):
            return CellValue(raw=raw, is_null=False, coerced=Decimal(trimmed))
        return CellValue(raw=raw, is_null=False, error="not_decimal")
    if kind == "date":
        fmt = DateFormat.parse(ftype.date_format)
        result = parse_date(trimmed, fmt)
        if isinstance(result, DateCheck):
            return CellValue(raw=raw, is_null=False, error=result.value)
        return CellValue(raw=raw, is_null=False, coerced=result)
    raise ValueError(f"unknown field type kind: {kind!r}")
