/** HTML/SVG string renderers over the pure view-models. Kept free of
 * document access so they are testable without a browser. */

import type { AnomalyRow } from "./anomalies.js";
import type { SortKey, SortState } from "./anomalies.js";
import type { HeatmapModel } from "./heatmap.js";
import { cellTooltip } from "./heatmap.js";
import type { TimelineLayout } from "./timeline.js";
import { linePath, tooltipText } from "./timeline.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderTimelineSvg(layout: TimelineLayout): string {
  if (layout.empty) {
    return `<p class="empty-state">No windows to show — run a query.</p>`;
  }
  const counts = linePath(layout.points.map((p) => ({ x: p.x, y: p.countY })));
  const ps = linePath(layout.points.map((p) => ({ x: p.x, y: p.pY })));
  const markers = layout.points
    .map(
      (p, i) =>
        `<circle class="hit" data-index="${i}" cx="${p.x.toFixed(1)}" cy="${p.pY.toFixed(1)}"` +
        ` r="4"><title>${escapeHtml(tooltipText(p.entry))}</title></circle>`,
    )
    .join("");
  const minP = layout.points[layout.minPIndex];
  const highlight = minP
    ? `<line class="min-p" x1="${minP.x.toFixed(1)}" y1="0" x2="${minP.x.toFixed(1)}"` +
      ` y2="${layout.height}" />`
    : "";
  return (
    `<svg viewBox="0 0 ${layout.width} ${layout.height}" class="timeline">` +
    highlight +
    `<path class="counts" d="${counts}" />` +
    `<path class="pvalues" d="${ps}" />` +
    markers +
    `</svg>`
  );
}

const HEADERS: [SortKey, string][] = [
  ["region", "Region"],
  ["window_end", "End date"],
  ["p_value", "P-value"],
  ["observed", "Count"],
  ["expected", "Expected"],
];

export function renderAnomalyTable(rows: AnomalyRow[], sort: SortState): string {
  if (rows.length === 0) {
    return `<p class="empty-state">No anomalies flagged.</p>`;
  }
  const head = HEADERS.map(([key, label]) => {
    const arrow = sort.key === key ? (sort.ascending ? " ▲" : " ▼") : "";
    return `<th data-sort="${key}">${label}${arrow}</th>`;
  }).join("");
  const body = rows
    .map(
      (r, i) =>
        `<tr class="anomaly-row" data-index="${i}">` +
        `<td>${escapeHtml(r.region)}</td><td>${r.windowEnd}</td>` +
        `<td>${r.pValue}</td><td>${r.observed}</td><td>${r.expected}</td>` +
        `<td class="terms">${escapeHtml(r.terms)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="anomalies"><thead><tr>${head}<th>Terms</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderHeatmap(model: HeatmapModel): string {
  const head = model.colLabels.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = model.rows
    .map((row) => {
      const cells = row.cells
        .map(
          (c) =>
            `<td class="${c.isRowMode ? "mode" : ""}" style="background:${c.color}"` +
            ` title="${escapeHtml(cellTooltip(c))}">` +
            `${row.isZero ? "" : (c.frequency * 100).toFixed(0) + "%"}</td>`,
        )
        .join("");
      const flag = row.isZero ? ` <span class="zero-flag">(no events)</span>` : "";
      return (
        `<tr class="${row.isZero ? "zero-row" : ""}">` +
        `<th>${escapeHtml(row.label)}${flag}</th>${cells}<td>${row.total}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="heatmap"><thead><tr>` +
    `<th>${escapeHtml(model.rowAttribute)} \\ ${escapeHtml(model.colAttribute)}</th>` +
    `${head}<th>n</th></tr></thead><tbody>${body}</tbody></table>`
  );
}
