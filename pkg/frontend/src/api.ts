import { DecisionRequest, QueueStats, ReviewItem } from "./types";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, detail);
}

/** Thin client over the review service; the server is the source of truth
 * and the UI holds no authoritative state. */
export class ReviewApi {
  constructor(private base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.base + path);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  getQueue(status?: string): Promise<ReviewItem[]> {
    const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.getJson<ReviewItem[]>(`/api/queue${suffix}`);
  }

  getItem(itemId: string): Promise<{ item: ReviewItem; decisions: unknown[] }> {
    return this.getJson(`/api/item/${encodeURIComponent(itemId)}`);
  }

  getStats(): Promise<QueueStats> {
    return this.getJson<QueueStats>("/api/stats");
  }

  async postDecision(decision: DecisionRequest): Promise<void> {
    const res = await fetch(this.base + "/api/decision", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(decision),
    });
    if (!res.ok) throw await parseError(res);
  }

  overridesExportUrl(): string {
    return this.base + "/api/export/overrides";
  }
}
