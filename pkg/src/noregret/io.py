"""CSV ingestion for ordinary and interval-valued populations.

Numeric columns are inferred (every cell parses as a rational). Values are
kept exact: ``"9.4"`` becomes ``Fraction(47, 5)``. In the interval dialect a
cell is either a plain value or ``lo..hi``.
"""

from __future__ import annotations

import csv
import io
import os
from importlib import resources
from typing import Mapping, Optional, Sequence, Union

from .errors import IngestionError, SchemaError
from .model import ItemRecord, Population, Schema
from .numeric import as_number

__all__ = ["load_population", "load_interval_records", "students", "student_intervals", "fixture_path"]

Source = Union[str, os.PathLike, io.TextIOBase]


def _read_rows(source: Source) -> tuple[list[str], list[list[str]]]:
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, newline="", encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise IngestionError(f"cannot read {os.fspath(source)!r}: {exc}") from None
    else:
        text = source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise IngestionError("empty CSV: a header row is required")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise IngestionError(f"duplicate column names in header {header}")
    body = rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise IngestionError(f"row {lineno}: expected {len(header)} cells, found {len(row)}")
    if not body:
        raise IngestionError("CSV has a header but no data rows")
    return header, [[c.strip() for c in r] for r in body]


def _parse_cell(text: str, interval: bool):
    if interval and ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = as_number(lo), as_number(hi)
        if lo > hi:
            raise ValueError(f"interval {text!r} has lo > hi")
        return (lo, hi)
    value = as_number(text)
    return (value, value) if interval else value


def _is_numeric(cells: Sequence[str], interval: bool) -> bool:
    for c in cells:
        try:
            _parse_cell(c, interval)
        except (ValueError, TypeError, ZeroDivisionError):
            return False
    return True


def _resolve_columns(header, body, id_column, name_column, group_column, attributes, interval):
    id_column = id_column or header[0]
    for col in (id_column, group_column):
        if col is not None and col not in header:
            raise IngestionError(f"column {col!r} not found in header {header}")
    if name_column is not None and name_column not in header:
        name_column = None
    reserved = {id_column, name_column, group_column}
    cols = {h: [row[i] for row in body] for i, h in enumerate(header)}
    if attributes is None:
        attributes = [h for h in header if h not in reserved and _is_numeric(cols[h], interval)]
    else:
        for a in attributes:
            if a not in header:
                raise IngestionError(f"attribute column {a!r} not found in header {header}")
    if group_column is None:
        candidates = [h for h in header if h not in reserved and h not in attributes]
        if len(candidates) != 1:
            raise IngestionError(
                f"cannot infer the group column from {candidates}; name it explicitly"
            )
        group_column = candidates[0]
    if not attributes:
        raise IngestionError("no numeric attribute columns found")
    return id_column, name_column, group_column, list(attributes)


def _rows(source, id_column, name_column, group_column, attributes, interval):
    header, body = _read_rows(source)
    id_col, name_col, group_col, attrs = _resolve_columns(
        header, body, id_column, name_column, group_column, attributes, interval
    )
    index = {h: i for i, h in enumerate(header)}
    seen = {}
    parsed = []
    for lineno, row in enumerate(body, start=2):
        rid = row[index[id_col]]
        if not rid:
            raise IngestionError(f"row {lineno}, column {id_col!r}: empty id")
        if rid in seen:
            raise IngestionError(f"row {lineno}, column {id_col!r}: duplicate id {rid!r} (first on row {seen[rid]})")
        seen[rid] = lineno
        values = []
        for a in attrs:
            cell = row[index[a]]
            try:
                values.append((a, _parse_cell(cell, interval)))
            except (ValueError, TypeError, ZeroDivisionError):
                raise IngestionError(f"row {lineno}, column {a!r}: not a number: {cell!r}") from None
        name = row[index[name_col]] if name_col else None
        parsed.append((rid, values, row[index[group_col]], name))
    return attrs, parsed


def load_population(
    source: Source,
    *,
    divisors: Optional[Mapping[str, object]] = None,
    id_column: Optional[str] = None,
    name_column: Optional[str] = "name",
    group_column: Optional[str] = None,
    attributes: Optional[Sequence[str]] = None,
) -> Population:
    """Read a population from CSV.

    The id column defaults to the first column, ``name`` is used for display
    when present, numeric columns become attributes in file order and the one
    remaining column is the group label. Items keep file order.
    """
    attrs, parsed = _rows(source, id_column, name_column, group_column, attributes, interval=False)
    items = tuple(ItemRecord(rid, tuple(values), group, name) for rid, values, group, name in parsed)
    try:
        schema = Schema(tuple(attrs), divisors or {})
    except SchemaError as exc:
        raise IngestionError(str(exc)) from None
    return Population(items, schema)


def load_interval_records(
    source: Source,
    *,
    divisors: Optional[Mapping[str, object]] = None,
    id_column: Optional[str] = None,
    name_column: Optional[str] = "name",
    group_column: Optional[str] = None,
    attributes: Optional[Sequence[str]] = None,
):
    """Read interval-valued records (``lo..hi`` cells) from CSV."""
    from .uncertain import IntervalPopulation, IntervalRecord

    attrs, parsed = _rows(source, id_column, name_column, group_column, attributes, interval=True)
    records = tuple(IntervalRecord(rid, tuple(values), group, name) for rid, values, group, name in parsed)
    try:
        schema = Schema(tuple(attrs), divisors or {})
    except SchemaError as exc:
        raise IngestionError(str(exc)) from None
    return IntervalPopulation(records, schema)


def fixture_path(name: str = "students.csv") -> str:
    return str(resources.files("noregret").joinpath("data", name))


def students(iq_divisor=10) -> Population:
    """The six-applicant admissions example, with IQ rescaled by ``iq_divisor``."""
    return load_population(fixture_path("students.csv"), divisors={"IQ": iq_divisor})


def student_intervals(iq_divisor=10):
    """The admissions example with Bob's IQ and Eve's grade widened to intervals."""
    return load_interval_records(fixture_path("students_intervals.csv"), divisors={"IQ": iq_divisor})
