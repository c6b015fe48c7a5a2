/** Wire types mirroring the /v1 JSON API. The UI never computes
 * statistics; every displayed number comes from one of these fields. */

export interface AttributeInfo {
  name: string;
  kind: "categorical" | "integer_binned";
  labels: string[];
}

export interface SchemaResponse {
  attributes: AttributeInfo[];
  calendar: { start: string; end: string };
  location_attribute: string | null;
}

export interface TimelineEntry {
  window: { start: string; end: string };
  observed: number;
  p_value: number;
}

export interface AnomalyReport {
  attributes: Record<string, string[]>;
  region: string[] | null;
  window_start: string;
  window_end: string;
  observed: number;
  expected: number;
  p_value: number;
  test: string;
}

export interface ScreenJob {
  status: "running" | "done" | "error";
  n_queries?: number;
  reports?: AnomalyReport[];
  error?: string;
}

export interface PivotResponse {
  row_attribute: string;
  col_attribute: string;
  row_labels: string[];
  col_labels: string[];
  cells: number[][];
  row_counts: number[];
  zero_rows: string[];
}

export interface SummaryResponse {
  total: number;
  per_category_counts: Record<string, Record<string, number>>;
  per_location_counts?: Record<string, number>;
  age_mean: number | null;
  age_sd: number | null;
  date_range: [string, string] | null;
}
