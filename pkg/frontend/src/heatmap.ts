/** Row-normalized heat map view-model. Color intensity is linear in
 * the relative frequency of the row (the server already normalizes
 * each occupied row to sum to 1); zero rows render greyed and flagged. */

import type { PivotResponse } from "./types.js";

export interface HeatCell {
  row: string;
  col: string;
  /** row-conditional relative frequency from the server */
  frequency: number;
  /** absolute joint count reconstructed from frequency x row count */
  count: number;
  color: string;
  isRowMode: boolean;
}

export interface HeatRow {
  label: string;
  total: number;
  isZero: boolean;
  cells: HeatCell[];
}

export interface HeatmapModel {
  rowAttribute: string;
  colAttribute: string;
  colLabels: string[];
  rows: HeatRow[];
}

/** Linear single-hue ramp: frequency 0 -> white, 1 -> saturated. */
export function frequencyColor(frequency: number): string {
  const f = Math.min(1, Math.max(0, frequency));
  const channel = Math.round(255 - 175 * f);
  return `rgb(${channel}, ${Math.round(255 - 120 * f)}, 255)`;
}

export function buildHeatmap(pivot: PivotResponse): HeatmapModel {
  const zero = new Set(pivot.zero_rows);
  const rows: HeatRow[] = pivot.row_labels.map((label, i) => {
    const freqs = pivot.cells[i] ?? [];
    const total = pivot.row_counts[i] ?? 0;
    const isZero = zero.has(label);
    let modeIndex = -1;
    if (!isZero && freqs.length > 0) {
      modeIndex = 0;
      freqs.forEach((f, j) => {
        if (f > (freqs[modeIndex] ?? 0)) modeIndex = j;
      });
    }
    const cells: HeatCell[] = pivot.col_labels.map((col, j) => {
      const frequency = freqs[j] ?? 0;
      return {
        row: label,
        col,
        frequency,
        count: Math.round(frequency * total),
        color: isZero ? "#e8e8e8" : frequencyColor(frequency),
        isRowMode: j === modeIndex,
      };
    });
    return { label, total, isZero, cells };
  });
  return {
    rowAttribute: pivot.row_attribute,
    colAttribute: pivot.col_attribute,
    colLabels: pivot.col_labels,
    rows,
  };
}

/** Tooltip contract: relative frequency and absolute count. */
export function cellTooltip(cell: HeatCell): string {
  return `${cell.row} x ${cell.col}: ${(cell.frequency * 100).toFixed(1)}% (${cell.count} events)`;
}
