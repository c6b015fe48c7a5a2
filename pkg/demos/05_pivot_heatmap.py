"""Explore conditional structure with row-normalized pivot tables.

A pivot cell holds the fraction of row-r events falling in column c, so
each occupied row sums to 1 and rows are directly comparable even when
their absolute counts differ by orders of magnitude. Columns are
ordered by overall frequency; empty rows stay visible and flagged.

Run:  python3 demos/05_pivot_heatmap.py
"""
import datetime as dt

from cubescreen import (AttributeSpec, Conjunction, Schema, StratumRate,
                        SyntheticConfig, build_cube, generate_synthetic)
from cubescreen.pivot import pivot, row_argmax


def main() -> None:
    schema = Schema((
        AttributeSpec("age", "integer_binned", bin_edges=(0, 12, 18, 26)),
        AttributeSpec("scene", "categorical",
                      domain=("home", "street", "school", "workplace")),
        AttributeSpec("gender", "categorical", domain=("female", "male")),
    ), age_attribute="age")

    # plant a distinct dominant scene per age band
    dominant = {"0-11": "home", "12-17": "school", "18-25": "street",
                "26+": "workplace"}
    strata = []
    for band, top_scene in dominant.items():
        for scene in schema["scene"].domain:
            for gender in schema["gender"].domain:
                rate = 8.0 if scene == top_scene else 1.0
                strata.append(StratumRate(
                    {"age": band, "scene": scene, "gender": gender}, rate))
    config = SyntheticConfig(
        schema=schema, start=dt.date(2020, 1, 1), end=dt.date(2021, 12, 31),
        strata=tuple(strata))
    cube = build_cube(generate_synthetic(config, seed=9), schema)

    table = pivot(cube, "age", "scene")
    print("share of each scene within each age band "
          "(rows sum to 1):\n")
    print(table.to_text())

    print("\nmodal scene per age band:")
    for band, scene in row_argmax(table).items():
        marker = " <- planted" if dominant.get(band) == scene else ""
        print(f"  {band:8} {scene}{marker}")

    # conditioning the same table on one gender keeps the structure
    female = pivot(cube, "age", "scene",
                   filter=Conjunction.of(gender="female"))
    assert row_argmax(female) == row_argmax(table)
    print("\nfemale-only table has the same modal scenes")


if __name__ == "__main__":
    main()
