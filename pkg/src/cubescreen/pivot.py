"""Row-conditioned relative-frequency tables over two categorical
attributes."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cube import Conjunction, CountCube, DateWindow
from .errors import QueryError


@dataclass(frozen=True)
class PivotTable:
    row_attribute: str
    col_attribute: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: np.ndarray  # (n_rows, n_cols) relative frequencies
    row_counts: np.ndarray  # absolute count per row

    @property
    def zero_rows(self) -> tuple[str, ...]:
        return tuple(l for l, n in zip(self.row_labels, self.row_counts)
                     if n == 0)

    def joint_counts(self) -> np.ndarray:
        """Reconstructed absolute joint counts (exact integers)."""
        return np.rint(self.cells * self.row_counts[:, None]).astype(np.int64)

    def to_json(self) -> str:
        return json.dumps({
            "row_attribute": self.row_attribute,
            "col_attribute": self.col_attribute,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "cells": self.cells.tolist(),
            "row_counts": self.row_counts.tolist(),
            "zero_rows": list(self.zero_rows),
        })

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow([f"{self.row_attribute}\\{self.col_attribute}"]
                        + list(self.col_labels) + ["row_count"])
        for i, label in enumerate(self.row_labels):
            writer.writerow([label]
                            + [f"{v:.6f}" for v in self.cells[i]]
                            + [int(self.row_counts[i])])
        return out.getvalue()

    def to_text(self, shades: str = " .:-=+*#%@") -> str:
        """Plain-text shaded rendering for terminal inspection."""
        width = max((len(l) for l in self.row_labels), default=0)
        lines = [" " * width + " " + " ".join(
            l[:6].center(6) for l in self.col_labels)]
        for i, label in enumerate(self.row_labels):
            cells = []
            for v in self.cells[i]:
                ch = shades[min(int(v * len(shades)), len(shades) - 1)]
                cells.append((ch * 3).center(6))
            suffix = "  (n=0)" if self.row_counts[i] == 0 else \
                f"  (n={int(self.row_counts[i])})"
            lines.append(label.ljust(width) + " " + " ".join(cells) + suffix)
        return "\n".join(lines)


def pivot(cube: CountCube, row_attr: str, col_attr: str,
          filter: Optional[Conjunction] = None,
          window: Optional[DateWindow] = None) -> PivotTable:
    """Conditional-frequency pivot: cell[r][c] is the fraction of
    filtered events with row value r that have column value c, so each
    nonzero row sums to 1. Rows with no events are kept, all-zero.

    Columns are ordered by descending whole-dataset frequency; rows keep
    schema order.
    """
    if row_attr == col_attr:
        raise QueryError("row and column attributes must differ")
    for name in (row_attr, col_attr):
        if name not in cube.schema:
            raise QueryError(f"unknown attribute {name!r}")
    filter = filter or Conjunction.of()
    if row_attr in filter.attributes or col_attr in filter.attributes:
        raise QueryError("filter must not constrain the pivot attributes")
    if window is None:
        window = DateWindow(cube.start, cube.n_days)

    row_labels = cube.schema[row_attr].labels
    col_labels_dom = cube.schema[col_attr].labels

    # warm one dense tally instead of scanning per cell, when it fits
    attrs = tuple(sorted({row_attr, col_attr, *filter.attributes}))
    n_cells = (cube.n_days + 1) * int(np.prod(
        [len(cube.schema[a].labels) for a in attrs]))
    if n_cells <= cube.policy.cell_budget:
        cube.group_prefix(attrs)

    joint = np.zeros((len(row_labels), len(col_labels_dom)), dtype=np.int64)
    for i, r in enumerate(row_labels):
        for j, c in enumerate(col_labels_dom):
            terms = dict(filter.as_dict)
            terms[row_attr] = r
            terms[col_attr] = c
            joint[i, j] = cube.count(Conjunction.from_dict(terms), window)

    # column order: global (unfiltered, full-calendar) frequency, descending;
    # ties stay in domain order
    full = DateWindow(cube.start, cube.n_days)
    global_freq = np.array([cube.count(Conjunction.from_dict({col_attr: c}),
                                       full)
                            for c in col_labels_dom])
    order = np.argsort(-global_freq, kind="stable")
    joint = joint[:, order]
    col_labels = tuple(col_labels_dom[j] for j in order)

    row_counts = joint.sum(axis=1)
    cells = np.zeros(joint.shape, dtype=float)
    nz = row_counts > 0
    cells[nz] = joint[nz] / row_counts[nz, None]
    return PivotTable(row_attribute=row_attr, col_attribute=col_attr,
                      row_labels=row_labels, col_labels=col_labels,
                      cells=cells, row_counts=row_counts)


def row_argmax(table: PivotTable) -> dict:
    """Modal column label per nonzero row; ties go to the earlier column."""
    out = {}
    for i, label in enumerate(table.row_labels):
        if table.row_counts[i] == 0:
            continue
        out[label] = table.col_labels[int(np.argmax(table.cells[i]))]
    return out
