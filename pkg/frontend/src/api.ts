/** Thin typed client for the /v1 JSON API. */

import type {
  AnomalyReport,
  PivotResponse,
  SchemaResponse,
  ScreenJob,
  SummaryResponse,
  TimelineEntry,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function handle<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      detail = body.error ?? body.detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(res.status, String(detail));
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  private get<T>(path: string): Promise<T> {
    return fetch(this.base + path).then((r) => handle<T>(r));
  }

  private post<T>(path: string, body: object): Promise<T> {
    return fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => handle<T>(r));
  }

  schema(): Promise<SchemaResponse> {
    return this.get("/v1/schema");
  }

  summary(): Promise<SummaryResponse> {
    return this.get("/v1/summary");
  }

  count(conjunction: object, window: object): Promise<{ count: number }> {
    return this.post("/v1/count", { conjunction, window });
  }

  timeline(request: object): Promise<TimelineEntry[]> {
    return this.post("/v1/timeline", request);
  }

  startScreen(config: object): Promise<{ job_id: string }> {
    return this.post("/v1/screen", { config });
  }

  screenStatus(jobId: string): Promise<ScreenJob> {
    return this.get(`/v1/screen/${jobId}`);
  }

  /** Poll a screen job until it leaves the running state. */
  async awaitScreen(jobId: string, intervalMs = 250, timeoutMs = 120_000): Promise<ScreenJob> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.screenStatus(jobId);
      if (job.status !== "running") return job;
      if (Date.now() > deadline) throw new ApiError(504, "screen job timed out");
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }

  pivot(row: string, col: string, filter: object = {}, window: object | null = null): Promise<PivotResponse> {
    return this.post("/v1/pivot", { row, col, filter, window });
  }
}

export type { AnomalyReport, ScreenJob };
