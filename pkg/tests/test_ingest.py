import datetime as dt
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubescreen.errors import SchemaMismatch
from cubescreen.ingest import (bin_age, infer_schema, parse_events,
                               serialize_events, summarize)
from cubescreen.schema import (DEFAULT_AGE_BIN_EDGES, UNKNOWN, AttributeSpec,
                               EventRecord, Schema, canonical_schema)

HEADER = "date,age,gender,state,municipality,scene,perpetrator\n"


def small_schema():
    return canonical_schema({
        "gender": ("female", "male"),
        "state": ("SAN MIGUEL", "MORAZAN"),
        "municipality": ("m1", "m2"),
        "scene": ("house", "lot"),
        "perpetrator": ("boyfriend", "stranger"),
    })


class TestParseEvents:
    def test_header_only(self):
        records, errors = parse_events(HEADER, small_schema())
        assert records == [] and errors == []

    def test_bad_date_row_is_skipped_not_fatal(self):
        text = (HEADER
                + "2008-01-03,13,female,SAN MIGUEL,m1,house,boyfriend\n"
                + "not-a-date,20,male,MORAZAN,m2,lot,stranger\n"
                + "2008-02-01,44,female,MORAZAN,m1,house,stranger\n")
        records, errors = parse_events(text, small_schema())
        assert len(records) == 2
        assert len(errors) == 1 and errors[0].line == 3

    def test_missing_column_is_fatal(self):
        with pytest.raises(SchemaMismatch):
            parse_events("date,age,gender\n", small_schema())

    def test_unknown_labels_map_to_reserved_category(self):
        text = HEADER + "2008-01-03,13,female,NOWHERE,m1,house,boyfriend\n"
        records, _ = parse_events(text, small_schema())
        assert records[0].values["state"] == UNKNOWN

    def test_blank_age_becomes_unknown_but_row_kept(self):
        text = HEADER + "2008-01-03,,female,MORAZAN,m1,house,boyfriend\n"
        records, errors = parse_events(text, small_schema())
        assert not errors
        assert records[0].values["age"] == UNKNOWN
        assert records[0].raw_age is None

    def test_out_of_range_age_is_row_error(self):
        text = HEADER + "2008-01-03,-2,female,MORAZAN,m1,house,boyfriend\n"
        records, errors = parse_events(text, small_schema())
        assert records == [] and len(errors) == 1

    def test_alternate_date_format(self):
        text = HEADER + "01/30/2008,13,female,MORAZAN,m1,house,boyfriend\n"
        records, _ = parse_events(text, small_schema())
        assert records[0].date == dt.date(2008, 1, 30)

    def test_output_order_equals_input_order(self):
        rows = [f"2008-01-{d:02d},13,female,MORAZAN,m1,house,boyfriend\n"
                for d in range(1, 11)]
        records, _ = parse_events(HEADER + "".join(rows), small_schema())
        assert [r.date.day for r in records] == list(range(1, 11))

    def test_round_trip(self):
        text = (HEADER
                + "2008-01-03,13,female,SAN MIGUEL,m1,house,boyfriend\n"
                + "2008-02-01,44,male,WEIRD,m2,lot,stranger\n"
                + "2009-06-15,,female,MORAZAN,m1,lot,boyfriend\n")
        schema = small_schema()
        records, _ = parse_events(text, schema)
        again, errors = parse_events(serialize_events(records, schema), schema)
        assert not errors
        assert again == records


class TestBinAge:
    def test_default_bins_have_the_12_14_bin(self):
        assert bin_age(13, DEFAULT_AGE_BIN_EDGES) == "12-14"
        assert bin_age(12, DEFAULT_AGE_BIN_EDGES) == "12-14"
        assert bin_age(14, DEFAULT_AGE_BIN_EDGES) == "12-14"
        assert bin_age(15, DEFAULT_AGE_BIN_EDGES) == "15-17"

    def test_boundaries(self):
        assert bin_age(0, DEFAULT_AGE_BIN_EDGES) == "0-4"
        assert bin_age(99, DEFAULT_AGE_BIN_EDGES) == "56+"

    @given(st.integers(min_value=0, max_value=130))
    def test_total_and_single_valued(self, age):
        label = bin_age(age, DEFAULT_AGE_BIN_EDGES)
        spec = AttributeSpec("age", "integer_binned",
                             bin_edges=DEFAULT_AGE_BIN_EDGES)
        assert label in spec.domain
        # exactly one bin contains the age
        edges = list(DEFAULT_AGE_BIN_EDGES) + [10 ** 9]
        containing = [i for i in range(len(edges) - 1)
                      if edges[i] <= age < edges[i + 1]]
        assert len(containing) == 1
        assert label == spec.domain[containing[0]]


class TestSummarize:
    def test_empty(self):
        s = summarize([], small_schema())
        assert s.total == 0
        assert s.age_mean is None and s.date_range is None

    def test_against_two_pass_oracle(self):
        schema = small_schema()
        rng_ages = [(i * 37) % 60 for i in range(100)]
        records = [
            EventRecord(date=dt.date(2008, 1, 1) + dt.timedelta(days=i % 50),
                        values={"age": bin_age(a, DEFAULT_AGE_BIN_EDGES),
                                "gender": "female", "state": "MORAZAN",
                                "municipality": "m1", "scene": "house",
                                "perpetrator": "stranger"},
                        raw_age=a)
            for i, a in enumerate(rng_ages)]
        s = summarize(records, schema)
        mean = sum(rng_ages) / len(rng_ages)
        sd = math.sqrt(sum((x - mean) ** 2 for x in rng_ages) / len(rng_ages))
        assert s.age_mean == pytest.approx(mean, abs=1e-12)
        assert s.age_sd == pytest.approx(sd, abs=1e-12)
        assert s.total == 100

    def test_per_label_counts_partition_total(self, toy_schema, toy_records):
        s = summarize(toy_records, toy_schema)
        for attr, counts in s.per_category_counts.items():
            assert sum(counts.values()) == s.total

    def test_age_histogram_counts_known_ages(self, toy_schema, toy_records):
        s = summarize(toy_records, toy_schema)
        known = [r for r in toy_records if r.raw_age is not None]
        assert sum(s.age_histogram.values()) == len(known)


class TestInferSchema:
    def test_infers_canonical_layout(self):
        text = (HEADER
                + "2008-01-03,13,female,SAN MIGUEL,m1,house,boyfriend\n"
                + "2008-02-01,44,male,MORAZAN,m2,lot,stranger\n")
        schema = infer_schema(text)
        assert set(schema.names) == {"age", "gender", "state", "municipality",
                                     "scene", "perpetrator"}
        assert schema["state"].domain == ("SAN MIGUEL", "MORAZAN")

    def test_infers_generic_layout(self):
        schema = infer_schema("date,color\n2020-01-01,red\n2020-01-02,blue\n")
        assert schema.names == ("color",)
        assert schema["color"].domain == ("red", "blue")

    def test_requires_date_column(self):
        with pytest.raises(SchemaMismatch):
            infer_schema("color\nred\n")
