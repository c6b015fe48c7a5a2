/** Dual-axis timeline layout: observed counts on the left axis,
 * p-values (log scale, inverted so dips stand out) on the right. Pure
 * geometry — the caller renders the returned points however it likes. */

import type { TimelineEntry } from "./types.js";

export interface TimelinePoint {
  x: number;
  countY: number;
  pY: number;
  entry: TimelineEntry;
}

export interface AxisTick {
  pos: number;
  label: string;
}

export interface TimelineLayout {
  width: number;
  height: number;
  points: TimelinePoint[];
  countTicks: AxisTick[];
  pTicks: AxisTick[];
  dateTicks: AxisTick[];
  /** index of the minimum-p window, -1 when empty */
  minPIndex: number;
  empty: boolean;
}

const P_FLOOR = 1e-30; // keep log scale finite for p = 0

export function layoutTimeline(
  entries: TimelineEntry[],
  width = 800,
  height = 240,
): TimelineLayout {
  if (entries.length === 0) {
    return {
      width,
      height,
      points: [],
      countTicks: [],
      pTicks: [],
      dateTicks: [],
      minPIndex: -1,
      empty: true,
    };
  }
  const maxCount = Math.max(1, ...entries.map((e) => e.observed));
  const logPs = entries.map((e) => Math.log10(Math.max(e.p_value, P_FLOOR)));
  const minLogP = Math.min(...logPs, -1); // at least one decade of range

  const xAt = (i: number) => (entries.length === 1 ? width / 2 : (i / (entries.length - 1)) * width);
  const countYAt = (c: number) => height - (c / maxCount) * height;
  // p = 1 sits at the top; smaller p drops toward the bottom
  const pYAt = (logP: number) => (logP / minLogP) * height;

  const points = entries.map((entry, i) => ({
    x: xAt(i),
    countY: countYAt(entry.observed),
    pY: pYAt(logPs[i] ?? 0),
    entry,
  }));

  let minPIndex = 0;
  entries.forEach((e, i) => {
    const best = entries[minPIndex];
    if (best && e.p_value < best.p_value) minPIndex = i;
  });

  const countTicks: AxisTick[] = [0, 0.5, 1].map((f) => ({
    pos: countYAt(f * maxCount),
    label: String(Math.round(f * maxCount)),
  }));
  const pTicks: AxisTick[] = [];
  for (let d = 0; d >= Math.ceil(minLogP); d -= Math.max(1, Math.ceil(-minLogP / 4))) {
    pTicks.push({ pos: pYAt(d), label: d === 0 ? "1" : `1e${d}` });
  }
  const dateTicks: AxisTick[] = [0, 0.25, 0.5, 0.75, 1].map((f) => {
    const i = Math.min(entries.length - 1, Math.round(f * (entries.length - 1)));
    return { pos: xAt(i), label: entries[i]?.window.end ?? "" };
  });

  return { width, height, points, countTicks, pTicks, dateTicks, minPIndex, empty: false };
}

/** Tooltip contract: the exact numbers for one hovered window. */
export function tooltipText(entry: TimelineEntry): string {
  return (
    `${entry.window.start} .. ${entry.window.end}: ` +
    `observed ${entry.observed}, p ${formatP(entry.p_value)}`
  );
}

export function formatP(p: number): string {
  if (p >= 0.001) return p.toFixed(4);
  return p.toExponential(2);
}

/** SVG path "d" attribute through the given (x, y) points. */
export function linePath(points: { x: number; y: number }[]): string {
  return points.map((p, i) => `${i === 0 ? "M" : "L"}${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" ");
}
