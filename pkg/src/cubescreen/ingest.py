"""Parsing, validation and summary statistics for event record files."""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import SchemaMismatch
from .schema import (CATEGORICAL, INTEGER_BINNED, UNKNOWN, AttributeSpec,
                     EventRecord, Schema, bin_value)

DATE_FORMATS = ("%Y-%m-%d", "%m/%d/%Y")
MAX_AGE = 130


@dataclass(frozen=True)
class RowError:
    line: int  # 1-based line number in the source, header included
    cause: str


@dataclass(frozen=True)
class DatasetSummary:
    total: int
    per_category_counts: dict  # attribute -> label -> count
    age_mean: Optional[float]
    age_sd: Optional[float]
    date_range: Optional[tuple[dt.date, dt.date]]
    age_histogram: dict  # age in years -> count, known ages only

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_category_counts": self.per_category_counts,
            "age_mean": self.age_mean,
            "age_sd": self.age_sd,
            "date_range": ([d.isoformat() for d in self.date_range]
                           if self.date_range else None),
            "age_histogram": {str(k): v for k, v in sorted(self.age_histogram.items())},
        }


def bin_age(raw_age: int, bins: Sequence[int]) -> str:
    """Bin label containing raw_age; ages past the last edge fall in the
    final open-ended bin."""
    return bin_value(raw_age, bins)


def parse_date(text: str, formats: Sequence[str] = DATE_FORMATS) -> dt.date:
    for fmt in formats:
        try:
            return dt.datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unparseable date {text!r}")


def parse_events(source: Union[str, TextIO], schema: Schema,
                 date_formats: Sequence[str] = DATE_FORMATS,
                 date_range: Optional[tuple[dt.date, dt.date]] = None,
                 ) -> tuple[list[EventRecord], list[RowError]]:
    """Parse a delimited event file against a schema.

    Malformed rows become RowError entries and are skipped; a header that
    does not name every schema attribute is fatal. Unknown category labels
    map to UNKNOWN so row counts are preserved. Output order follows input
    order.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    header = reader.fieldnames
    if header is None:
        return [], []
    required = ("date",) + schema.names
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaMismatch(f"header missing column(s): {', '.join(missing)}")

    records: list[EventRecord] = []
    errors: list[RowError] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            date = parse_date(row["date"] or "", date_formats)
        except ValueError as e:
            errors.append(RowError(line_no, str(e)))
            continue
        if date_range and not (date_range[0] <= date <= date_range[1]):
            errors.append(RowError(line_no, f"date {date} outside declared range"))
            continue

        values = {}
        raw_age = None
        bad = None
        for attr in schema.attributes:
            raw = (row.get(attr.name) or "").strip()
            if attr.kind == INTEGER_BINNED:
                if raw == "":
                    values[attr.name] = UNKNOWN
                    continue
                try:
                    n = int(raw)
                except ValueError:
                    bad = f"unparseable {attr.name} {raw!r}"
                    break
                if not 0 <= n <= MAX_AGE:
                    bad = f"{attr.name} {n} out of range"
                    break
                values[attr.name] = bin_value(n, attr.bin_edges)
                if attr.name == schema.age_attribute:
                    raw_age = n
            else:
                values[attr.name] = raw if raw in attr.domain else UNKNOWN
        if bad:
            errors.append(RowError(line_no, bad))
            continue
        records.append(EventRecord(date=date, values=values, raw_age=raw_age))
    return records, errors


def serialize_events(records: Iterable[EventRecord], schema: Schema) -> str:
    """Canonical CSV text for a record list. Binned attributes are written
    from raw_age when available so parse(serialize(x)) == x."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(("date",) + schema.names)
    for rec in records:
        row = [rec.date.isoformat()]
        for attr in schema.attributes:
            if (attr.kind == INTEGER_BINNED and attr.name == schema.age_attribute
                    and rec.raw_age is not None):
                row.append(str(rec.raw_age))
            else:
                v = rec.values[attr.name]
                row.append("" if v == UNKNOWN and attr.kind == INTEGER_BINNED else v)
        writer.writerow(row)
    return out.getvalue()


def summarize(records: Sequence[EventRecord], schema: Schema) -> DatasetSummary:
    per_cat: dict = {a.name: {} for a in schema.attributes}
    ages = []
    dates = []
    for rec in records:
        dates.append(rec.date)
        if rec.raw_age is not None:
            ages.append(rec.raw_age)
        for name, label in rec.values.items():
            counts = per_cat[name]
            counts[label] = counts.get(label, 0) + 1

    if ages:
        mean = sum(ages) / len(ages)
        var = sum((x - mean) ** 2 for x in ages) / len(ages)
        sd = math.sqrt(var)
    else:
        mean = sd = None
    hist: dict = {}
    for a in ages:
        hist[a] = hist.get(a, 0) + 1
    return DatasetSummary(
        total=len(records),
        per_category_counts=per_cat,
        age_mean=mean,
        age_sd=sd,
        date_range=(min(dates), max(dates)) if dates else None,
        age_histogram=hist,
    )


def infer_schema(source: Union[str, TextIO],
                 age_bin_edges: Sequence[int] = None) -> Schema:
    """Build a schema from an event CSV by collecting the labels observed
    in each column. The `date` column is required; a column named `age` is
    treated as integer-binned with the default (or given) edges; every
    other column becomes categorical with labels in first-appearance
    order."""
    from .schema import DEFAULT_AGE_BIN_EDGES, AttributeSpec, Schema
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise SchemaMismatch("empty input")
    if "date" not in reader.fieldnames:
        raise SchemaMismatch("header missing column(s): date")
    cat_cols = [c for c in reader.fieldnames if c not in ("date", "age")]
    domains: dict = {name: [] for name in cat_cols}
    seen: dict = {name: set() for name in cat_cols}
    for row in reader:
        for name in cat_cols:
            label = (row.get(name) or "").strip()
            if label and label not in seen[name]:
                seen[name].add(label)
                domains[name].append(label)
    attrs = []
    if "age" in reader.fieldnames:
        attrs.append(AttributeSpec("age", INTEGER_BINNED,
                                   bin_edges=tuple(age_bin_edges
                                                   or DEFAULT_AGE_BIN_EDGES)))
    for name in cat_cols:
        attrs.append(AttributeSpec(
            name, CATEGORICAL,
            domain=tuple(domains[name]) or (UNKNOWN,)))
    return Schema(tuple(attrs),
                  age_attribute="age" if "age" in reader.fieldnames else None)
