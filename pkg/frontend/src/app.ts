/** SPA wiring: query builder, timeline, anomaly table, heat map.
 * All statistics come from /v1 responses; this file only routes state
 * between the API client, the pure view-models, and the DOM. */

import { ApiClient } from "./api.js";
import { DEFAULT_SORT, nextSort, reportToQuery, sortReports, toRows } from "./anomalies.js";
import type { SortKey, SortState } from "./anomalies.js";
import { buildHeatmap } from "./heatmap.js";
import {
  emptyQuery,
  queryFromHash,
  queryToHash,
  timelineRequest,
  toggleLabel,
  toggleRegionMember,
  validateQuery,
} from "./query.js";
import type { QuerySpec } from "./query.js";
import { renderAnomalyTable, renderHeatmap, renderTimelineSvg, escapeHtml } from "./render.js";
import { SequenceTracker } from "./seq.js";
import { layoutTimeline } from "./timeline.js";
import type { AnomalyReport, SchemaResponse } from "./types.js";

interface AppState {
  schema: SchemaResponse | null;
  query: QuerySpec;
  reports: AnomalyReport[];
  sort: SortState;
}

export function startApp(root: HTMLElement, api = new ApiClient()): void {
  const seq = new SequenceTracker();
  const state: AppState = {
    schema: null,
    query: location.hash.length > 1 ? queryFromHash(location.hash) : emptyQuery(),
    reports: [],
    sort: DEFAULT_SORT,
  };

  root.innerHTML = `
    <header><h1>cubescreen</h1></header>
    <section id="builder"><h2>Query</h2><div id="terms"></div>
      <div id="errors"></div>
      <button id="run-timeline">Timeline</button>
      <button id="run-screen">Screen everything</button></section>
    <section id="timeline-panel"><h2>Timeline</h2><div id="timeline"></div></section>
    <section id="anomaly-panel"><h2>Anomalies</h2><div id="anomalies"></div></section>
    <section id="pivot-panel"><h2>Pivot heat map</h2>
      <label>rows <select id="pivot-row"></select></label>
      <label>columns <select id="pivot-col"></select></label>
      <div id="heatmap"></div></section>`;

  const el = (id: string) => root.querySelector<HTMLElement>(`#${id}`)!;

  function syncUrl(): void {
    history.replaceState(null, "", `#${queryToHash(state.query)}`);
  }

  function renderBuilder(): void {
    const schema = state.schema;
    if (!schema) return;
    const sections = schema.attributes.map((attr) => {
      const isLocation = attr.name === schema.location_attribute;
      const selected = isLocation ? state.query.region : (state.query.terms[attr.name] ?? []);
      const chips = attr.labels
        .map((label) => {
          const on = selected.includes(label) ? " on" : "";
          return (
            `<button class="chip${on}" data-attr="${escapeHtml(attr.name)}"` +
            ` data-label="${escapeHtml(label)}" data-location="${isLocation}">` +
            `${escapeHtml(label)}</button>`
          );
        })
        .join("");
      const note = isLocation ? " (region — counts as one term)" : "";
      return `<div class="attr"><h3>${escapeHtml(attr.name)}${note}</h3>${chips}</div>`;
    });
    el("terms").innerHTML = sections.join("");
    const errors = validateQuery(state.query, schema);
    el("errors").innerHTML = errors.map((e) => `<p class="error">${escapeHtml(e)}</p>`).join("");
    (el("run-timeline") as HTMLButtonElement).disabled = errors.length > 0;
  }

  function renderAnomalies(): void {
    el("anomalies").innerHTML = renderAnomalyTable(
      toRows(sortReports(state.reports, state.sort)),
      state.sort,
    );
  }

  async function loadTimeline(): Promise<void> {
    const token = seq.issue("timeline");
    const entries = await api.timeline(timelineRequest(state.query));
    if (!seq.isCurrent("timeline", token)) return; // stale response
    el("timeline").innerHTML = renderTimelineSvg(layoutTimeline(entries));
  }

  async function runScreen(): Promise<void> {
    const schema = state.schema;
    if (!schema) return;
    const token = seq.issue("screen");
    el("anomalies").innerHTML = `<p class="empty-state">screening…</p>`;
    const attrs = schema.attributes
      .filter((a) => a.name !== schema.location_attribute)
      .map((a) => a.name);
    const { job_id } = await api.startScreen({
      attributes: [...attrs, ...(schema.location_attribute ? [schema.location_attribute] : [])],
      location_attribute: schema.location_attribute,
      window_length: state.query.windowLength,
      stride: state.query.stride,
      reference_length: state.query.referenceLength,
      alpha: 0.05,
    });
    const job = await api.awaitScreen(job_id);
    if (!seq.isCurrent("screen", token)) return;
    if (job.status === "error") {
      el("anomalies").innerHTML = `<p class="error">${escapeHtml(job.error ?? "failed")}</p>`;
      return;
    }
    state.reports = job.reports ?? [];
    state.sort = DEFAULT_SORT;
    renderAnomalies();
  }

  async function loadHeatmap(): Promise<void> {
    const row = (el("pivot-row") as HTMLSelectElement).value;
    const col = (el("pivot-col") as HTMLSelectElement).value;
    if (!row || !col || row === col) return;
    const token = seq.issue("pivot");
    const pivot = await api.pivot(row, col);
    if (!seq.isCurrent("pivot", token)) return;
    el("heatmap").innerHTML = renderHeatmap(buildHeatmap(pivot));
  }

  el("terms").addEventListener("click", (ev) => {
    const chip = (ev.target as HTMLElement).closest<HTMLElement>(".chip");
    if (!chip) return;
    const attr = chip.dataset.attr!;
    const label = chip.dataset.label!;
    state.query =
      chip.dataset.location === "true"
        ? toggleRegionMember(state.query, label)
        : toggleLabel(state.query, attr, label);
    syncUrl();
    renderBuilder();
  });

  el("run-timeline").addEventListener("click", () => void loadTimeline());
  el("run-screen").addEventListener("click", () => void runScreen());

  el("anomalies").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const header = target.closest<HTMLElement>("th[data-sort]");
    if (header) {
      state.sort = nextSort(state.sort, header.dataset.sort as SortKey);
      renderAnomalies();
      return;
    }
    const row = target.closest<HTMLElement>(".anomaly-row");
    if (row) {
      const sorted = sortReports(state.reports, state.sort);
      const report = sorted[Number(row.dataset.index)];
      if (!report) return;
      // drill-down: populate the builder with the row's exact terms and
      // reopen the timeline for them
      state.query = reportToQuery(report, state.query.referenceLength, state.query.stride);
      syncUrl();
      renderBuilder();
      void loadTimeline();
    }
  });

  root.querySelectorAll("#pivot-row, #pivot-col").forEach((sel) => {
    sel.addEventListener("change", () => void loadHeatmap());
  });

  void api.schema().then((schema) => {
    state.schema = schema;
    renderBuilder();
    const options = schema.attributes
      .map((a) => `<option value="${escapeHtml(a.name)}">${escapeHtml(a.name)}</option>`)
      .join("");
    el("pivot-row").innerHTML = options;
    el("pivot-col").innerHTML = options;
    const second = schema.attributes[1];
    if (second) (el("pivot-col") as HTMLSelectElement).value = second.name;
  });
}
