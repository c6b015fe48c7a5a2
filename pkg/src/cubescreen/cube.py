"""Immutable count index over event records.

Events are stored column-wise as small integer codes plus a day index.
Daily count series for attribute-value conjunctions are materialized as
prefix-sum arrays, so any window count is two lookups. Dense group tallies
(one array per attribute combination) are built eagerly for small
combinations and lazily cached otherwise; a built cube is never mutated
except for these idempotent cache fills, so it is safe to share across
readers.
"""
from __future__ import annotations

import datetime as dt
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import BuildError, QueryError
from .schema import EventRecord, Schema

EPOCH = dt.date(1970, 1, 1)


@dataclass(frozen=True)
class Conjunction:
    """A conjunctive filter: attribute -> non-empty set of labels.

    A multi-label set means aggregation (the event's value may be any of
    the labels). The empty conjunction matches everything.
    """
    terms: tuple  # ((attr, (label, ...)), ...) sorted by attr, labels sorted

    @classmethod
    def of(cls, **terms) -> "Conjunction":
        return cls.from_dict(terms)

    @classmethod
    def from_dict(cls, terms: Mapping[str, Union[str, Iterable[str]]]) -> "Conjunction":
        norm = []
        for attr in sorted(terms):
            v = terms[attr]
            labels = (v,) if isinstance(v, str) else tuple(sorted(set(v)))
            if not labels:
                raise QueryError(f"empty label set for {attr!r}")
            norm.append((attr, labels))
        return cls(terms=tuple(norm))

    @property
    def as_dict(self) -> dict:
        return {attr: labels for attr, labels in self.terms}

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(attr for attr, _ in self.terms)

    def __len__(self):
        return len(self.terms)

    def matches(self, record: EventRecord) -> bool:
        return all(record.values.get(attr) in labels
                   for attr, labels in self.terms)


@dataclass(frozen=True)
class DateWindow:
    start: dt.date
    length: int  # days, >= 1

    def __post_init__(self):
        if self.length < 1:
            raise QueryError("window length must be >= 1")

    @property
    def end(self) -> dt.date:
        """Last day inside the window (inclusive)."""
        return self.start + dt.timedelta(days=self.length - 1)

    def contains(self, day: dt.date) -> bool:
        return self.start <= day <= self.end


@dataclass
class MaterializationPolicy:
    """Which group tallies to build eagerly.

    Combinations of up to max_eager_size attributes are materialized at
    build time when their dense tally fits in cell_budget cells; everything
    else is computed on first use and cached.
    """
    max_eager_size: int = 2
    cell_budget: int = 30_000_000


class CountCube:
    def __init__(self, schema: Schema, start: dt.date, n_days: int,
                 codes: Mapping[str, np.ndarray], day_idx: np.ndarray,
                 policy: Optional[MaterializationPolicy] = None):
        self.schema = schema
        self.start = start
        self.n_days = n_days
        self._codes = dict(codes)
        self._day_idx = day_idx
        self.total_events = int(day_idx.size)
        self._labels = {a.name: a.labels for a in schema.attributes}
        self._label_codes = {name: {l: i for i, l in enumerate(labels)}
                             for name, labels in self._labels.items()}
        self._group_cache: dict = {}
        self._series_cache: dict = {}
        self._total_prefix = self._prefix_from_mask(None)
        self.policy = policy or MaterializationPolicy()
        self._materialize(self.policy)

    # -- construction ------------------------------------------------------

    def _materialize(self, policy: MaterializationPolicy):
        names = [a.name for a in self.schema.attributes]
        for size in range(1, policy.max_eager_size + 1):
            for combo in itertools.combinations(names, size):
                cells = (self.n_days + 1) * int(np.prod(
                    [len(self._labels[a]) for a in combo]))
                if cells <= policy.cell_budget:
                    self.group_prefix(combo)

    def _prefix_from_mask(self, mask) -> np.ndarray:
        idx = self._day_idx if mask is None else self._day_idx[mask]
        daily = np.bincount(idx, minlength=self.n_days)
        out = np.zeros(self.n_days + 1, dtype=np.int64)
        np.cumsum(daily, out=out[1:])
        return out

    # -- calendar helpers --------------------------------------------------

    @property
    def end(self) -> dt.date:
        return self.start + dt.timedelta(days=self.n_days - 1)

    def day_index(self, day: dt.date) -> int:
        return (day - self.start).days

    def date_at(self, index: int) -> dt.date:
        return self.start + dt.timedelta(days=index)

    def _window_bounds(self, w: DateWindow) -> tuple[int, int]:
        s = self.day_index(w.start)
        if s < 0 or s + w.length > self.n_days:
            raise QueryError(f"window {w.start}+{w.length}d outside calendar "
                             f"[{self.start}, {self.end}]")
        return s, s + w.length

    # -- group tallies -----------------------------------------------------

    def group_prefix(self, attrs: Sequence[str]) -> np.ndarray:
        """Dense prefix-sum tally, shape (n_days+1, |dom(a1)|, ..., |dom(ak)|).

        Entry [t, i1, ..., ik] is the number of events before day t whose
        values code to (i1, ..., ik). Cached; callers must not mutate it.
        """
        key = tuple(sorted(attrs))
        cached = self._group_cache.get(key)
        if cached is not None:
            return cached
        dims = [len(self._labels[a]) for a in key]
        flat = self._day_idx.astype(np.int64).copy()
        for a, d in zip(key, dims):
            flat = flat * d + self._codes[a]
        daily = np.bincount(flat, minlength=self.n_days * int(np.prod(dims)))
        daily = daily.reshape(self.n_days, *dims)
        out = np.zeros((self.n_days + 1, *dims), dtype=np.int64)
        np.cumsum(daily, axis=0, out=out[1:])
        self._group_cache[key] = out
        return out

    # -- conjunction series ------------------------------------------------

    def _validate(self, q: Conjunction):
        for attr, labels in q.terms:
            if attr not in self._labels:
                raise QueryError(f"unknown attribute {attr!r}")
            codes = self._label_codes[attr]
            for l in labels:
                if l not in codes:
                    raise QueryError(f"unknown label {l!r} for {attr!r}")

    def prefix(self, q: Conjunction) -> np.ndarray:
        """Prefix-summed daily count series for a conjunction
        (length n_days + 1)."""
        self._validate(q)
        if not q.terms:
            return self._total_prefix
        attrs = q.attributes  # already sorted
        grp = self._group_cache.get(attrs)
        if grp is None and q.terms in self._series_cache:
            return self._series_cache[q.terms]
        if grp is not None:
            out = np.zeros(self.n_days + 1, dtype=np.int64)
            code_sets = [[self._label_codes[a][l] for l in labels]
                         for a, labels in q.terms]
            for combo in itertools.product(*code_sets):
                out += grp[(slice(None),) + combo]
            return out
        mask = np.ones(self.total_events, dtype=bool)
        for attr, labels in q.terms:
            codes = np.array([self._label_codes[attr][l] for l in labels])
            mask &= np.isin(self._codes[attr], codes)
        out = self._prefix_from_mask(mask)
        self._series_cache[q.terms] = out
        return out

    def series(self, q: Conjunction) -> np.ndarray:
        """Per-day counts (length n_days)."""
        return np.diff(self.prefix(q))

    def count(self, q: Conjunction, w: Optional[DateWindow] = None) -> int:
        """Number of events matching q; restricted to w when given."""
        if w is None:
            p = self.prefix(q)
            return int(p[-1])
        s, e = self._window_bounds(w)
        p = self.prefix(q)
        return int(p[e] - p[s])

    def timeline(self, q: Conjunction, window_length: int,
                 stride: int = 1) -> list[tuple[DateWindow, int]]:
        """Counts of q over every admissible window at the given stride."""
        if stride < 1:
            raise QueryError("stride must be >= 1")
        p = self.prefix(q)
        out = []
        for s in range(0, self.n_days - window_length + 1, stride):
            w = DateWindow(self.date_at(s), window_length)
            out.append((w, int(p[s + window_length] - p[s])))
        return out

    # -- snapshots ----------------------------------------------------------

    def save(self, path) -> None:
        """Versioned snapshot; load() answers all queries identically."""
        np.savez_compressed(
            path,
            format_version=np.int64(1),
            schema=np.frombuffer(self.schema.to_json().encode(), dtype=np.uint8),
            start=np.int64((self.start - EPOCH).days),
            n_days=np.int64(self.n_days),
            day_idx=self._day_idx,
            **{f"codes_{name}": arr for name, arr in self._codes.items()},
        )

    @classmethod
    def load(cls, path, policy: Optional[MaterializationPolicy] = None) -> "CountCube":
        with np.load(path) as z:
            if int(z["format_version"]) != 1:
                raise BuildError("unsupported snapshot version")
            schema = Schema.from_json(bytes(z["schema"]).decode())
            start = EPOCH + dt.timedelta(days=int(z["start"]))
            codes = {name[len("codes_"):]: z[name]
                     for name in z.files if name.startswith("codes_")}
            return cls(schema, start, int(z["n_days"]), codes, z["day_idx"],
                       policy=policy)


def build_cube(records: Sequence[EventRecord], schema: Schema,
               policy: Optional[MaterializationPolicy] = None,
               calendar: Optional[tuple[dt.date, dt.date]] = None) -> CountCube:
    """Index records into a CountCube.

    The calendar is dense over [start, end]; by default it spans the
    records' date range (a single placeholder day when empty). A record
    outside an explicit calendar is a BuildError.
    """
    if calendar is None:
        if records:
            calendar = (min(r.date for r in records),
                        max(r.date for r in records))
        else:
            calendar = (EPOCH, EPOCH)
    start, end = calendar
    n_days = (end - start).days + 1
    if n_days < 1:
        raise BuildError("calendar range reversed")

    label_codes = {a.name: {l: i for i, l in enumerate(a.labels)}
                   for a in schema.attributes}
    day_idx = np.empty(len(records), dtype=np.int64)
    codes = {a.name: np.empty(len(records), dtype=np.int32)
             for a in schema.attributes}
    for i, rec in enumerate(records):
        d = (rec.date - start).days
        if not 0 <= d < n_days:
            raise BuildError(f"record date {rec.date} outside calendar")
        day_idx[i] = d
        for name, table in label_codes.items():
            label = rec.values.get(name)
            if label not in table:
                raise BuildError(f"record {i}: label {label!r} not in "
                                 f"{name!r} domain")
            codes[name][i] = table[label]
    return CountCube(schema, start, n_days, codes, day_idx, policy=policy)
