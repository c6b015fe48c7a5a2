import datetime as dt

import pytest

from cubescreen import (AttributeSpec, Schema, SyntheticConfig,
                        generate_synthetic, uniform_strata)


@pytest.fixture
def toy_schema():
    return Schema((
        AttributeSpec("state", "categorical", domain=("A", "B", "C", "D")),
        AttributeSpec("age", "integer_binned", bin_edges=(0, 12, 15, 18)),
        AttributeSpec("kind", "categorical", domain=("x", "y", "z")),
    ), age_attribute="age")


@pytest.fixture
def toy_records(toy_schema):
    config = SyntheticConfig(
        schema=toy_schema,
        start=dt.date(2019, 1, 1), end=dt.date(2020, 12, 31),
        strata=uniform_strata(toy_schema, ("state", "age", "kind"), 12.0))
    return generate_synthetic(config, seed=7)


def scan_count(records, terms, window=None):
    """Linear-scan oracle for conjunctive window counts."""
    n = 0
    for r in records:
        if window is not None and not window.contains(r.date):
            continue
        ok = True
        for attr, labels in terms.items():
            labels = {labels} if isinstance(labels, str) else set(labels)
            if r.values.get(attr) not in labels:
                ok = False
                break
        if ok:
            n += 1
    return n
