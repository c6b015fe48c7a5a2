import { describe, expect, it } from "vitest";

import {
  DEFAULT_SORT,
  nextSort,
  reportToQuery,
  sortReports,
  toRows,
} from "../src/anomalies.js";
import { renderAnomalyTable } from "../src/render.js";
import { termCount, timelineRequest } from "../src/query.js";
import type { AnomalyReport } from "../src/types.js";

function report(p: number, observed: number, end: string, region: string[] | null): AnomalyReport {
  const start = new Date(Date.parse(end) - 27 * 86_400_000).toISOString().slice(0, 10);
  return {
    attributes: { perpetrator: ["boyfriend"], age: ["12-14"] },
    region,
    window_start: start,
    window_end: end,
    observed,
    expected: observed / 3,
    p_value: p,
    test: "fisher",
  };
}

const FIXTURE: AnomalyReport[] = [
  report(1.22e-5, 23, "2008-01-30", ["LA UNION", "MORAZAN", "SAN MIGUEL"]),
  report(3.1e-4, 18, "2008-02-06", ["SAN MIGUEL", "USULUTAN"]),
  report(2.0e-3, 12, "2008-03-01", ["SAN MIGUEL"]),
  report(9.0e-3, 9, "2008-04-01", null),
  report(4.0e-2, 7, "2008-05-01", ["MORAZAN"]),
];

describe("sorting", () => {
  it("defaults to ascending p-value", () => {
    const shuffled = [FIXTURE[3]!, FIXTURE[0]!, FIXTURE[4]!, FIXTURE[1]!, FIXTURE[2]!];
    const sorted = sortReports(shuffled, DEFAULT_SORT);
    expect(sorted.map((r) => r.p_value)).toEqual(FIXTURE.map((r) => r.p_value));
  });

  it("clicking the same column toggles direction, a new one resets ascending", () => {
    let sort = DEFAULT_SORT;
    sort = nextSort(sort, "p_value");
    expect(sort).toEqual({ key: "p_value", ascending: false });
    sort = nextSort(sort, "observed");
    expect(sort).toEqual({ key: "observed", ascending: true });
  });

  it("sorts by observed count descending", () => {
    const sorted = sortReports(FIXTURE, { key: "observed", ascending: false });
    expect(sorted.map((r) => r.observed)).toEqual([23, 18, 12, 9, 7]);
  });

  it("does not mutate its input", () => {
    const input = [...FIXTURE].reverse();
    const before = [...input];
    sortReports(input, DEFAULT_SORT);
    expect(input).toEqual(before);
  });
});

describe("drill-down", () => {
  it("rebuilds the query from the top row's exact terms", () => {
    const q = reportToQuery(FIXTURE[0]!);
    expect(q.terms).toEqual({ perpetrator: ["boyfriend"], age: ["12-14"] });
    expect(q.region).toEqual(["LA UNION", "MORAZAN", "SAN MIGUEL"]);
    expect(termCount(q)).toBe(3);
  });

  it("preserves the report's window length for the timeline", () => {
    const q = reportToQuery(FIXTURE[0]!);
    // 2008-01-03 .. 2008-01-30 inclusive
    expect(q.windowLength).toBe(28);
  });

  it("issues a /timeline body with the row's exact terms", () => {
    const body = timelineRequest(reportToQuery(FIXTURE[1]!)) as {
      conjunction: Record<string, string[]>;
      region: string[] | null;
      window_length: number;
    };
    expect(body.conjunction).toEqual({ perpetrator: ["boyfriend"], age: ["12-14"] });
    expect(body.region).toEqual(["SAN MIGUEL", "USULUTAN"]);
    expect(body.window_length).toBe(28);
  });

  it("handles a region-free report", () => {
    const q = reportToQuery(FIXTURE[3]!);
    expect(q.region).toEqual([]);
    expect(termCount(q)).toBe(2);
  });
});

describe("table rendering", () => {
  it("renders the empty state for no reports", () => {
    expect(renderAnomalyTable([], DEFAULT_SORT)).toContain("No anomalies");
  });

  it("renders one clickable row per report in rank order", () => {
    const html = renderAnomalyTable(toRows(sortReports(FIXTURE, DEFAULT_SORT)), DEFAULT_SORT);
    expect(html.match(/anomaly-row/g)).toHaveLength(FIXTURE.length);
    expect(html.indexOf("1.22e-5")).toBeLessThan(html.indexOf("3.10e-4"));
    expect(html).toContain("{LA UNION, MORAZAN, SAN MIGUEL}");
    expect(html).toContain("perpetrator=boyfriend");
  });

  it("marks the active sort column", () => {
    const html = renderAnomalyTable(toRows(FIXTURE), { key: "observed", ascending: false });
    expect(html).toContain("Count ▼");
  });
});
