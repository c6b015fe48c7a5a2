/** Ranked anomaly table view-model: sortable columns and one-click
 * drill-down that turns a row back into a QuerySpec so the timeline can
 * be reopened with exactly that row's terms. */

import type { QuerySpec } from "./query.js";
import { emptyQuery } from "./query.js";
import type { AnomalyReport } from "./types.js";

export type SortKey = "p_value" | "observed" | "expected" | "window_end" | "region";

export interface SortState {
  key: SortKey;
  ascending: boolean;
}

export const DEFAULT_SORT: SortState = { key: "p_value", ascending: true };

function sortValue(r: AnomalyReport, key: SortKey): number | string {
  switch (key) {
    case "p_value":
      return r.p_value;
    case "observed":
      return r.observed;
    case "expected":
      return r.expected;
    case "window_end":
      return r.window_end;
    case "region":
      return r.region ? r.region.join(", ") : "";
  }
}

export function sortReports(reports: AnomalyReport[], sort: SortState): AnomalyReport[] {
  const sign = sort.ascending ? 1 : -1;
  return [...reports].sort((a, b) => {
    const va = sortValue(a, sort.key);
    const vb = sortValue(b, sort.key);
    if (va < vb) return -sign;
    if (va > vb) return sign;
    // stable tie-break on the ranking key
    return a.p_value - b.p_value;
  });
}

/** Clicking a header toggles direction on the same key, otherwise
 * switches to the new key ascending. */
export function nextSort(current: SortState, clicked: SortKey): SortState {
  if (current.key === clicked) return { key: clicked, ascending: !current.ascending };
  return { key: clicked, ascending: true };
}

/** Drill-down: rebuild the query state from a flagged report. The
 * report's window length is preserved, and the caller passes through
 * the stride and reference period the screen ran with, so the
 * timeline's minimum-p window can land exactly on the report's
 * window. */
export function reportToQuery(
  report: AnomalyReport,
  referenceLength = 365,
  stride = 1,
): QuerySpec {
  const q = emptyQuery();
  for (const [attr, labels] of Object.entries(report.attributes)) {
    q.terms[attr] = [...labels].sort();
  }
  q.region = report.region ? [...report.region].sort() : [];
  const days =
    (Date.parse(report.window_end) - Date.parse(report.window_start)) / 86_400_000 + 1;
  q.windowLength = Math.max(1, Math.round(days));
  q.referenceLength = referenceLength;
  q.stride = Math.max(1, stride);
  return q;
}

export interface AnomalyRow {
  region: string;
  windowEnd: string;
  pValue: string;
  observed: number;
  expected: string;
  terms: string;
  report: AnomalyReport;
}

export function toRows(reports: AnomalyReport[]): AnomalyRow[] {
  return reports.map((r) => ({
    region: r.region ? `{${r.region.join(", ")}}` : "—",
    windowEnd: r.window_end,
    pValue: r.p_value >= 0.001 ? r.p_value.toFixed(4) : r.p_value.toExponential(2),
    observed: r.observed,
    expected: r.expected.toFixed(2),
    terms: Object.entries(r.attributes)
      .map(([a, ls]) => `${a}=${ls.join("|")}`)
      .join(", "),
    report: r,
  }));
}
