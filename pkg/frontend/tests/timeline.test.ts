import { describe, expect, it } from "vitest";

import { formatP, layoutTimeline, linePath, tooltipText } from "../src/timeline.js";
import { renderTimelineSvg } from "../src/render.js";
import type { TimelineEntry } from "../src/types.js";

function entry(end: string, observed: number, p: number): TimelineEntry {
  return { window: { start: "2013-01-01", end }, observed, p_value: p };
}

/** Injected-cluster shape: flat counts with a spike whose p-value dips. */
const INJECTED: TimelineEntry[] = [
  entry("2013-03-01", 20, 0.7),
  entry("2013-03-08", 22, 0.5),
  entry("2013-03-15", 61, 1.2e-9),
  entry("2013-03-22", 58, 3.0e-8),
  entry("2013-03-29", 21, 0.6),
];

describe("layoutTimeline", () => {
  it("flags the empty series", () => {
    const layout = layoutTimeline([]);
    expect(layout.empty).toBe(true);
    expect(layout.points).toEqual([]);
    expect(layout.minPIndex).toBe(-1);
  });

  it("p-value dip aligns with the count spike on the injected fixture", () => {
    const layout = layoutTimeline(INJECTED);
    expect(layout.minPIndex).toBe(2);
    const spike = layout.points[2]!;
    // highest count -> lowest countY; lowest p -> largest pY (drop)
    for (const p of layout.points) {
      expect(spike.countY).toBeLessThanOrEqual(p.countY);
      expect(spike.pY).toBeGreaterThanOrEqual(p.pY);
    }
  });

  it("x positions are monotone across the calendar", () => {
    const xs = layoutTimeline(INJECTED).points.map((p) => p.x);
    for (let i = 1; i < xs.length; i++) expect(xs[i]!).toBeGreaterThan(xs[i - 1]!);
  });

  it("single entry is centred and safe", () => {
    const layout = layoutTimeline([entry("2013-03-01", 5, 0.3)], 800, 240);
    expect(layout.points[0]!.x).toBe(400);
    expect(Number.isFinite(layout.points[0]!.pY)).toBe(true);
  });

  it("p = 0 stays finite on the log axis", () => {
    const layout = layoutTimeline([entry("2013-03-01", 5, 0)]);
    expect(Number.isFinite(layout.points[0]!.pY)).toBe(true);
  });
});

describe("tooltip contract", () => {
  it("shows the window, observed count, and p", () => {
    const text = tooltipText(entry("2013-03-15", 61, 1.2e-9));
    expect(text).toContain("2013-01-01 .. 2013-03-15");
    expect(text).toContain("observed 61");
    expect(text).toContain("1.20e-9");
  });

  it("formats p-values readably on both scales", () => {
    expect(formatP(0.0421)).toBe("0.0421");
    expect(formatP(1.2e-9)).toBe("1.20e-9");
  });
});

describe("SVG rendering", () => {
  it("renders an empty state without an svg element", () => {
    const html = renderTimelineSvg(layoutTimeline([]));
    expect(html).toContain("empty-state");
    expect(html).not.toContain("<svg");
  });

  it("renders both series, hover targets, and the min-p marker", () => {
    const html = renderTimelineSvg(layoutTimeline(INJECTED));
    expect(html).toContain('class="counts"');
    expect(html).toContain('class="pvalues"');
    expect(html.match(/<circle/g)).toHaveLength(INJECTED.length);
    expect(html).toContain('class="min-p"');
    expect(html).toContain("observed 61");
  });

  it("linePath produces a single M followed by Ls", () => {
    const d = linePath([
      { x: 0, y: 1 },
      { x: 2, y: 3 },
      { x: 4, y: 5 },
    ]);
    expect(d).toBe("M0.0,1.0 L2.0,3.0 L4.0,5.0");
  });
});
