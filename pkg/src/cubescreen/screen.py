"""Massive screening: enumerate conjunctive queries over windows and
region aggregates, score each against historical and rest-of-population
baselines, and rank the significant elevations.

For a query with target stratum T (conjunction, optionally restricted to a
region set) and window W, the scored 2x2 table is

                 W (current)   reference (preceding days)
    T                a              b
    complement       c              d

where the complement holds events matching the same non-spatial terms but
outside the region set (or all non-matching events when no location term
is present). Windows whose reference period would extend before the
calendar are skipped, not clipped.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .cube import Conjunction, CountCube, DateWindow
from .errors import ConfigError, EmptyScreen, QueryError
from .geo import RegionSet
from . import stats
from .stats import ContingencyTable, benjamini_hochberg, evaluate_table

# Elevation-sided p-values cannot dip below ~0.25 unless the observed count
# exceeds its expectation, so screening skips the exact test for
# non-elevated cells whenever alpha is at most this bound.
_PRUNE_ALPHA = 0.25


@dataclass(frozen=True)
class ScreeningConfig:
    attributes: tuple[str, ...]
    location_attribute: Optional[str] = None  # must be one of `attributes`
    max_fixed_terms: int = 3
    window_length: int = 28
    stride: int = 1
    reference_length: int = 365
    k_max: int = 5
    d_max: float = 50.0
    alpha: float = 0.05
    prospective: bool = False
    fdr_bh: bool = False

    def __post_init__(self):
        if self.window_length < 1:
            raise ConfigError("window_length must be >= 1")
        if self.reference_length < self.window_length:
            raise ConfigError("reference_length must cover the window")
        if not 1 <= self.max_fixed_terms <= 3:
            raise ConfigError("max_fixed_terms must be in 1..3")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")
        if (self.location_attribute is not None
                and self.location_attribute not in self.attributes):
            raise ConfigError("location_attribute not in attributes")

    @classmethod
    def from_json(cls, text: str) -> "ScreeningConfig":
        obj = json.loads(text)
        obj["attributes"] = tuple(obj["attributes"])
        return cls(**obj)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2)


@dataclass(frozen=True)
class ScreeningQuery:
    conjunction: Conjunction  # non-spatial single-label terms
    region: Optional[RegionSet]
    window: DateWindow


@dataclass(frozen=True)
class AnomalyReport:
    query: ScreeningQuery
    observed: int
    expected: float
    p_value: float
    test_used: str
    table: ContingencyTable

    def to_dict(self) -> dict:
        return {
            "attributes": {a: list(ls) for a, ls in
                           self.query.conjunction.terms},
            "region": (list(self.query.region.sorted_members)
                       if self.query.region else None),
            "window_start": self.query.window.start.isoformat(),
            "window_end": self.query.window.end.isoformat(),
            "observed": self.observed,
            "expected": round(self.expected, 6),
            "p_value": self.p_value,
            "test": self.test_used,
        }


@dataclass(frozen=True)
class ScreenOutcome:
    reports: tuple[AnomalyReport, ...]  # ranked, p <= alpha
    n_queries: int  # total queries scored


def _attribute_subsets(config: ScreeningConfig) -> list[tuple[str, ...]]:
    """Subsets of the screened attributes, size 1..max_fixed_terms, in
    deterministic (size, position) order."""
    attrs = config.attributes
    out = []
    for size in range(1, min(config.max_fixed_terms, len(attrs)) + 1):
        out.extend(itertools.combinations(attrs, size))
    return out


def _admissible_starts(cube: CountCube, config: ScreeningConfig) -> range:
    first = config.reference_length
    last = cube.n_days - config.window_length
    return range(first, last + 1, config.stride)


def _nonspatial_combos(cube: CountCube, attrs: Sequence[str]):
    domains = [cube.schema[a].labels for a in attrs]
    return itertools.product(*domains)


def enumerate_queries(cube: CountCube, config: ScreeningConfig,
                      regions: Sequence[RegionSet]) -> Iterator[ScreeningQuery]:
    """Every screening query, in the canonical deterministic order shared
    with massive_screen: attribute subset, then non-spatial label combo,
    then region set, then window start."""
    for subset in _attribute_subsets(config):
        nonspatial = [a for a in subset if a != config.location_attribute]
        spatial = config.location_attribute in subset
        region_axis: Sequence = regions if spatial else (None,)
        if spatial and not regions:
            continue
        for combo in _nonspatial_combos(cube, nonspatial):
            conj = Conjunction.from_dict(dict(zip(nonspatial, combo)))
            for region in region_axis:
                for s in _admissible_starts(cube, config):
                    yield ScreeningQuery(
                        conjunction=conj, region=region,
                        window=DateWindow(cube.date_at(s), config.window_length))


def full_conjunction(q: ScreeningQuery, config: ScreeningConfig) -> Conjunction:
    """The query's conjunction with its region set folded in as a
    location term."""
    terms = dict(q.conjunction.as_dict)
    if q.region is not None:
        terms[config.location_attribute] = q.region.members
    return Conjunction.from_dict(terms)


def build_table(cube: CountCube, q: ScreeningQuery,
                config: ScreeningConfig) -> ContingencyTable:
    """Contingency table for one query via direct cube counts."""
    s = cube.day_index(q.window.start)
    if s < config.reference_length:
        raise QueryError("reference period extends before the calendar")
    e = s + q.window.length
    r0 = s - config.reference_length
    target = cube.prefix(full_conjunction(q, config))
    if q.region is not None:
        base = cube.prefix(q.conjunction)
    else:
        base = cube.prefix(Conjunction.of())
    comp = base - target
    return ContingencyTable(a=int(target[e] - target[s]),
                            b=int(target[s] - target[r0]),
                            c=int(comp[e] - comp[s]),
                            d=int(comp[s] - comp[r0]))


def score_query(cube: CountCube, q: ScreeningQuery,
                config: ScreeningConfig) -> AnomalyReport:
    """Score a single query. An empty table scores p=1, observed 0."""
    t = build_table(cube, q, config)
    res = evaluate_table(t)
    return AnomalyReport(query=q, observed=t.a, expected=res.expected_a,
                         p_value=res.p_value, test_used=res.test_used,
                         table=t)


def _scan_groups(cube: CountCube, config: ScreeningConfig,
                 regions: Sequence[RegionSet],
                 starts: Optional[np.ndarray] = None):
    """Yield (queries_meta, a, b, c, d) blocks, vectorized over
    (region, start) for one non-spatial label combo at a time.

    Block arrays have shape (n_regions_or_1, n_starts); queries_meta is
    (conjunction, region_axis, starts, base_index) where base_index is the
    global enumeration index of the block's first query.
    """
    if starts is None:
        starts = np.array(_admissible_starts(cube, config), dtype=np.int64)
    L = config.window_length
    R = config.reference_length
    loc = config.location_attribute

    membership = None
    if regions and loc is not None:
        loc_labels = cube.schema[loc].labels
        loc_code = {l: i for i, l in enumerate(loc_labels)}
        membership = np.zeros((len(regions), len(loc_labels)))
        for ri, region in enumerate(regions):
            for m in region.members:
                membership[ri, loc_code[m]] = 1.0

    index = 0
    for subset in _attribute_subsets(config):
        nonspatial = [a for a in subset if a != loc]
        spatial = loc in subset
        if spatial and not regions:
            continue
        region_axis: Sequence = regions if spatial else (None,)
        n_regions = len(region_axis)

        if spatial:
            grp = cube.group_prefix(tuple(nonspatial) + (loc,))
            grp_attrs = tuple(sorted(tuple(nonspatial) + (loc,)))
            loc_axis = grp_attrs.index(loc) + 1  # axis 0 is time
        for combo in _nonspatial_combos(cube, nonspatial):
            conj = Conjunction.from_dict(dict(zip(nonspatial, combo)))
            base = cube.prefix(conj)  # same non-spatial terms, all locations
            if spatial:
                sel = _slice_group(cube, grp, grp_attrs, loc_axis,
                                   dict(zip(nonspatial, combo)))
                # sel: (n_days+1, n_locations) -> (n_regions, n_days+1)
                target = membership @ sel.T
            else:
                target = cube.prefix(conj)[None, :].astype(float)
                base = cube._total_prefix
            comp = base[None, :] - target

            if starts.size:
                a = target[:, starts + L] - target[:, starts]
                b = target[:, starts] - target[:, starts - R]
                c = comp[:, starts + L] - comp[:, starts]
                d = comp[:, starts] - comp[:, starts - R]
            else:
                a = b = c = d = np.zeros((n_regions, 0))
            yield (conj, region_axis, starts, index), a, b, c, d
            index += n_regions * starts.size


def _slice_group(cube, grp, grp_attrs, loc_axis, fixed: dict) -> np.ndarray:
    idx: list = [slice(None)] * grp.ndim
    for i, attr in enumerate(grp_attrs):
        if attr in fixed:
            idx[i + 1] = cube._label_codes[attr][fixed[attr]]
    out = grp[tuple(idx)]
    # remaining axes: time and location; location may precede time order-wise
    return out if out.ndim == 2 else out.reshape(grp.shape[0], -1)


def _score_block(a, b, c, d, alpha):
    """Elevation-sided p-values for a block, with safe pruning: cells with
    a == 0, or with a <= expected when alpha <= _PRUNE_ALPHA, are assigned
    p = 1 without running the exact test (their true p always exceeds
    alpha)."""
    a = a.astype(np.int64); b = b.astype(np.int64)
    c = c.astype(np.int64); d = d.astype(np.int64)
    n = a + b + c + d
    safe_n = np.where(n > 0, n, 1)
    ea = (a + b) * (a + c) / safe_n
    p = np.ones(a.shape)
    cand = a > 0
    if alpha <= _PRUNE_ALPHA:
        cand &= a > ea
    if cand.any():
        p_c, _, _ = stats.evaluate_tables_vec(a[cand], b[cand], c[cand], d[cand])
        p[cand] = p_c
    return p, ea


def _collect_flagged(cube, config, regions, starts, threshold):
    flagged = []
    n_queries = 0
    for meta, a, b, c, d in _scan_groups(cube, config, regions, starts=starts):
        conj, region_axis, block_starts, base_index = meta
        n_queries += a.size
        p, ea = _score_block(a, b, c, d, threshold)
        hits = np.argwhere(p <= threshold)
        for ri, si in hits:
            w = DateWindow(cube.date_at(int(block_starts[si])),
                           config.window_length)
            q = ScreeningQuery(conjunction=conj, region=region_axis[ri],
                               window=w)
            table = ContingencyTable(int(a[ri, si]), int(b[ri, si]),
                                     int(c[ri, si]), int(d[ri, si]))
            test = stats.select_test(table) if table.total else stats.FISHER
            order = base_index + ri * block_starts.size + si
            flagged.append((float(p[ri, si]),
                            -(float(a[ri, si]) - float(ea[ri, si])),
                            order,
                            AnomalyReport(query=q, observed=int(a[ri, si]),
                                          expected=float(ea[ri, si]),
                                          p_value=float(p[ri, si]),
                                          test_used=test, table=table)))
    return flagged, n_queries


def _apply_bh(flagged, n_queries, alpha):
    """Benjamini-Hochberg over all scored queries. Unflagged queries all
    have raw p above alpha, so the flagged ones occupy the lowest ranks;
    their adjusted values only need the global total m."""
    if not flagged:
        return flagged
    m = n_queries
    raw = np.array([f[0] for f in flagged])
    order = np.argsort(raw, kind="stable")
    adj_sorted = raw[order] * m / np.arange(1, raw.size + 1)
    adj_sorted = np.minimum.accumulate(adj_sorted[::-1])[::-1]
    adj = np.empty_like(raw)
    adj[order] = np.minimum(adj_sorted, 1.0)
    out = []
    for f, p_adj in zip(flagged, adj):
        if p_adj <= alpha:
            out.append((float(p_adj), f[1], f[2],
                        dataclasses.replace(f[3], p_value=float(p_adj))))
    return out


def massive_screen(cube: CountCube, config: ScreeningConfig,
                   regions: Sequence[RegionSet],
                   starts: Optional[np.ndarray] = None) -> ScreenOutcome:
    """Score every enumerated query; return reports at p <= alpha, sorted
    ascending by p-value (ties: larger observed-expected excess, then
    enumeration order), plus the total number of queries scored."""
    flagged, n_queries = _collect_flagged(cube, config, regions, starts,
                                          config.alpha)
    if config.fdr_bh:
        flagged = _apply_bh(flagged, n_queries, config.alpha)
    flagged.sort(key=lambda f: (f[0], f[1], f[2]))
    return ScreenOutcome(reports=tuple(f[3] for f in flagged),
                         n_queries=n_queries)


def prospective_screen(cube: CountCube, config: ScreeningConfig,
                       regions: Sequence[RegionSet],
                       frontier: dt.date) -> ScreenOutcome:
    """massive_screen restricted to windows ending exactly at the frontier.

    Only data strictly in the window's past (the window itself plus its
    reference period) is read, so events after the frontier cannot
    influence the result.
    """
    f = cube.day_index(frontier)
    if not 0 <= f < cube.n_days:
        raise QueryError(f"frontier {frontier} outside calendar")
    s = f - config.window_length + 1
    if s < config.reference_length:
        raise EmptyScreen(
            f"no admissible window ends at {frontier}: the reference period "
            f"would start before the calendar")
    return massive_screen(cube, config, regions,
                          starts=np.array([s], dtype=np.int64))


def pvalue_timeline(cube: CountCube, conjunction: Conjunction,
                    region: Optional[RegionSet],
                    config: ScreeningConfig
                    ) -> list[tuple[DateWindow, int, float]]:
    """(window, observed, p-value) for a fixed conjunction/region over
    every admissible window. No pruning: every entry carries its exact
    elevation-sided p-value."""
    starts = np.array(_admissible_starts(cube, config), dtype=np.int64)
    L, R = config.window_length, config.reference_length
    q0 = ScreeningQuery(conjunction=conjunction, region=region,
                        window=DateWindow(cube.start, L))
    target = cube.prefix(full_conjunction(q0, config)).astype(np.int64)
    if region is not None:
        base = cube.prefix(conjunction)
    else:
        base = cube._total_prefix
    comp = base - target
    a = target[starts + L] - target[starts]
    b = target[starts] - target[starts - R]
    c = comp[starts + L] - comp[starts]
    d = comp[starts] - comp[starts - R]
    p, _, _ = stats.evaluate_tables_vec(a, b, c, d)
    return [(DateWindow(cube.date_at(int(s)), L), int(ai), float(pi))
            for s, ai, pi in zip(starts, a, p)]


# -- exports ----------------------------------------------------------------

def reports_to_jsonl(reports: Iterable[AnomalyReport]) -> str:
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n"
                   for r in reports)


def reports_to_csv(reports: Iterable[AnomalyReport]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["attributes", "region", "window_start", "window_end",
                     "observed", "expected", "p_value", "test"])
    for r in reports:
        d = r.to_dict()
        writer.writerow([
            ";".join(f"{a}={'|'.join(ls)}" for a, ls in sorted(
                d["attributes"].items())),
            ";".join(d["region"]) if d["region"] else "",
            d["window_start"], d["window_end"], d["observed"],
            f"{d['expected']:.6g}", f"{d['p_value']:.6g}", d["test"],
        ])
    return out.getvalue()


def reports_to_table1_csv(reports: Iterable[AnomalyReport]) -> str:
    """CSV in the ranked-anomaly shape: states, end_date, p_value, count,
    expected_count. End dates use MM/DD/YYYY."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["states", "end_date", "p_value", "count",
                     "expected_count"])
    for r in reports:
        states = ("{" + ", ".join(r.query.region.sorted_members) + "}"
                  if r.query.region else "")
        writer.writerow([states, r.query.window.end.strftime("%m/%d/%Y"),
                         f"{r.p_value:.3g}", r.observed,
                         f"{r.expected:.2f}"])
    return out.getvalue()
