import datetime as dt
import itertools

import numpy as np
import pytest

from cubescreen.cube import (Conjunction, CountCube, DateWindow,
                             MaterializationPolicy, build_cube)
from cubescreen.errors import BuildError, QueryError
from cubescreen.schema import EventRecord

from conftest import scan_count


from cubescreen import (AttributeSpec, Schema, SyntheticConfig,
                        generate_synthetic, uniform_strata)


@pytest.fixture(scope="module")
def toy_schema():
    return Schema((
        AttributeSpec("state", "categorical", domain=("A", "B", "C", "D")),
        AttributeSpec("age", "integer_binned", bin_edges=(0, 12, 15, 18)),
        AttributeSpec("kind", "categorical", domain=("x", "y", "z")),
    ), age_attribute="age")


@pytest.fixture(scope="module")
def toy_records(toy_schema):
    config = SyntheticConfig(
        schema=toy_schema,
        start=dt.date(2019, 1, 1), end=dt.date(2020, 12, 31),
        strata=uniform_strata(toy_schema, ("state", "age", "kind"), 12.0))
    return generate_synthetic(config, seed=7)


@pytest.fixture(scope="module")
def cube(toy_schema, toy_records):
    return build_cube(toy_records, toy_schema)


def random_conjunction(rng, schema, max_terms=3):
    attrs = list(rng.choice(schema.names, size=rng.integers(1, max_terms + 1),
                            replace=False))
    terms = {}
    for a in attrs:
        domain = schema[a].labels
        k = int(rng.integers(1, min(3, len(domain)) + 1))
        terms[a] = set(rng.choice(domain, size=k, replace=False))
    return Conjunction.from_dict(terms)


def random_window(rng, cube):
    length = int(rng.integers(1, cube.n_days))
    start = int(rng.integers(0, cube.n_days - length + 1))
    return DateWindow(cube.date_at(start), length)


class TestBuild:
    def test_empty_records(self, toy_schema):
        empty = build_cube([], toy_schema)
        assert empty.total_events == 0
        w = DateWindow(empty.start, 1)
        assert empty.count(Conjunction.of(), w) == 0
        assert empty.count(Conjunction.of(state="A"), w) == 0

    def test_total_events(self, cube, toy_records):
        assert cube.total_events == len(toy_records)

    def test_record_outside_calendar_is_build_error(self, toy_schema,
                                                    toy_records):
        with pytest.raises(BuildError):
            build_cube(toy_records, toy_schema,
                       calendar=(dt.date(2019, 1, 1), dt.date(2019, 6, 1)))

    def test_empty_conjunction_series_is_daily_totals(self, cube,
                                                      toy_records):
        naive = np.zeros(cube.n_days, dtype=int)
        for r in toy_records:
            naive[(r.date - cube.start).days] += 1
        assert np.array_equal(cube.series(Conjunction.of()), naive)

    def test_deterministic_build(self, toy_schema, toy_records):
        c1 = build_cube(toy_records, toy_schema)
        c2 = build_cube(toy_records, toy_schema)
        q = Conjunction.of(state={"A", "C"}, kind="y")
        w = DateWindow(c1.start, 300)
        assert c1.count(q, w) == c2.count(q, w)


class TestCount:
    def test_empty_conjunction_full_calendar(self, cube, toy_records):
        w = DateWindow(cube.start, cube.n_days)
        assert cube.count(Conjunction.of(), w) == len(toy_records)

    def test_zero_length_window_rejected(self, cube):
        with pytest.raises(QueryError):
            DateWindow(cube.start, 0)

    def test_window_outside_calendar_rejected(self, cube):
        with pytest.raises(QueryError):
            cube.count(Conjunction.of(),
                       DateWindow(cube.end, 2))

    def test_unknown_attribute_rejected(self, cube):
        with pytest.raises(QueryError):
            cube.count(Conjunction.of(color="red"), DateWindow(cube.start, 1))

    def test_unknown_label_rejected(self, cube):
        with pytest.raises(QueryError):
            cube.count(Conjunction.of(state="Z"), DateWindow(cube.start, 1))

    def test_random_probes_match_linear_scan(self, cube, toy_records,
                                             toy_schema):
        rng = np.random.default_rng(0)
        for _ in range(200):
            q = random_conjunction(rng, toy_schema)
            w = random_window(rng, cube)
            assert cube.count(q, w) == scan_count(toy_records, q.as_dict, w)

    def test_additivity_over_disjoint_labels(self, cube):
        w = DateWindow(cube.start + dt.timedelta(days=100), 200)
        both = cube.count(Conjunction.of(state={"A", "B"}, kind="x"), w)
        a = cube.count(Conjunction.of(state="A", kind="x"), w)
        b = cube.count(Conjunction.of(state="B", kind="x"), w)
        assert both == a + b

    def test_window_monotonicity(self, cube):
        q = Conjunction.of(kind="y")
        small = DateWindow(cube.start + dt.timedelta(days=50), 100)
        big = DateWindow(cube.start + dt.timedelta(days=25), 200)
        assert cube.count(q, small) <= cube.count(q, big)

    def test_term_monotonicity(self, cube):
        w = DateWindow(cube.start, 400)
        loose = cube.count(Conjunction.of(state="A"), w)
        tight = cube.count(Conjunction.of(state="A", kind="x"), w)
        assert tight <= loose

    def test_query_order_independence(self, cube, toy_schema):
        rng = np.random.default_rng(1)
        probes = [(random_conjunction(rng, toy_schema),
                   random_window(rng, cube)) for _ in range(30)]
        first = [cube.count(q, w) for q, w in probes]
        second = [cube.count(q, w) for q, w in reversed(probes)]
        assert first == second[::-1]

    def test_materialized_count_does_not_scan_events(self, toy_schema,
                                                     toy_records):
        cube = build_cube(toy_records, toy_schema)
        q = Conjunction.of(state="A", kind="x")
        w = DateWindow(cube.start, 100)
        expected = cube.count(q, w)

        class Booby:
            def __getitem__(self, item):
                raise AssertionError("raw event array was scanned")

        cube._codes = {name: Booby() for name in cube._codes}
        cube._day_idx = Booby()
        # size-2 groups are materialized at build time, so counting must
        # not touch the raw arrays
        assert cube.count(q, w) == expected
        other = DateWindow(cube.start + dt.timedelta(days=200), 50)
        cube.count(q, other)

    def test_lazy_size3_cached_after_first_use(self, toy_schema, toy_records):
        cube = build_cube(toy_records, toy_schema,
                          policy=MaterializationPolicy(max_eager_size=2))
        q = Conjunction.of(state="A", kind="x", age="12-14")
        w = DateWindow(cube.start, 100)
        expected = cube.count(q, w)

        class Booby:
            def __getitem__(self, item):
                raise AssertionError("raw event array was scanned twice")

        cube._codes = {name: Booby() for name in cube._codes}
        assert cube.count(q, w) == expected


class TestTimeline:
    def test_full_calendar_single_entry(self, cube, toy_records):
        q = Conjunction.of(state="B")
        entries = cube.timeline(q, window_length=cube.n_days)
        assert len(entries) == 1
        w = DateWindow(cube.start, cube.n_days)
        assert entries[0][1] == cube.count(q, w)

    def test_partition_identity(self, cube):
        q = Conjunction.of(kind="z")
        length = 43  # 731 days = 17 windows exactly
        entries = cube.timeline(q, window_length=length, stride=length)
        total = cube.count(q, DateWindow(cube.start, cube.n_days))
        assert sum(n for _, n in entries) == total

    def test_each_entry_matches_count(self, cube, toy_schema):
        rng = np.random.default_rng(2)
        q = random_conjunction(rng, toy_schema)
        for w, n in cube.timeline(q, window_length=60, stride=30):
            assert n == cube.count(q, w)

    def test_bad_stride_rejected(self, cube):
        with pytest.raises(QueryError):
            cube.timeline(Conjunction.of(), 10, stride=0)


class TestSnapshot:
    def test_save_load_answers_identically(self, cube, toy_schema, tmp_path):
        path = tmp_path / "cube.npz"
        cube.save(path)
        loaded = CountCube.load(path)
        assert loaded.total_events == cube.total_events
        assert loaded.start == cube.start and loaded.n_days == cube.n_days
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = random_conjunction(rng, toy_schema)
            w = random_window(rng, cube)
            assert loaded.count(q, w) == cube.count(q, w)
