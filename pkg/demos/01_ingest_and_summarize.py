"""Parse an event CSV, tolerate dirty rows, and print summary statistics.

Event records arrive as CSV with a date column plus categorical and
integer attributes. Rows with unparseable dates or ages are skipped with
a line-numbered diagnostic; unfamiliar labels are kept under the
reserved UNKNOWN label instead of being dropped, so totals stay honest.

Run:  python3 demos/01_ingest_and_summarize.py
"""
import io

from cubescreen import infer_schema, parse_events, summarize

RAW = """\
date,age,gender,state,municipality
2013-04-02,15,female,SAN MIGUEL,SAN MIGUEL
2013-04-02,17,female,USULUTAN,JIQUILISCO
04/03/2013,31,female,SAN SALVADOR,SOYAPANGO
2013-04-05,,female,MORAZAN,
2013-04-09,twelve,female,LA UNION,LA UNION
2013-04-11,12,female,SANTA ANA,SANTA ANA
not-a-date,20,female,SAN MIGUEL,SAN MIGUEL
2013-04-19,44,male,CABANAS,ILOBASCO
"""


def main() -> None:
    schema = infer_schema(RAW)
    records, errors = parse_events(io.StringIO(RAW).read(), schema)

    print(f"parsed {len(records)} records, skipped {len(errors)} rows")
    for err in errors:
        print(f"  line {err.line}: {err.cause}")

    # blank or unmappable fields survive as UNKNOWN instead of losing
    # the whole row
    for r in records:
        if "UNKNOWN" in r.values.values():
            print(f"  kept with UNKNOWN fields: {r.date} {r.values}")

    s = summarize(records, schema)
    print(f"\ndates {s.date_range[0]} .. {s.date_range[1]}")
    if s.age_mean is not None:
        print(f"age mean {s.age_mean:.1f}, sd {s.age_sd:.1f}")
    for attr, counts in s.per_category_counts.items():
        shown = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
        print(f"{attr}: {shown}")


if __name__ == "__main__":
    main()
