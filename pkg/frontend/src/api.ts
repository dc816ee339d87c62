/**
 * Typed client for the labeling service.
 *
 * Every method maps 1:1 onto an HTTP endpoint; nothing is computed
 * client-side.  Non-2xx responses become ApiError with the server's
 * `detail` message so callers can surface it inline.
 */

export interface ViewPayload {
  view_id: number;
  depth: number;
  n: number;
  /** Normalized coordinates, one [x, y] per point, each axis in [-1, 1]. */
  points: [number, number][];
  /** 0 = unlabeled, 1 = seed, 2 = assigned. */
  status: number[];
  /** Class id per point, -1 where status is 0. */
  labels: number[];
  /** [op, params, size] per ancestor view, root first. */
  lineage: [string, Record<string, unknown>, number][];
  can_go_back: boolean;
  class_count: number;
  eta: number;
  unlabeled_total: number;
}

export interface PreviewResult {
  member_count: number;
  histogram: Record<string, number>;
  majority: number | null;
  purity: number | null;
  empty_reason?: string;
}

export interface CommitResult {
  outcome: string;
  assigned_class: number | null;
  member_count: number;
  reason: string;
  override: boolean;
  view: ViewPayload;
}

export interface ExportResult {
  indices: number[];
  labels: number[];
  status: number[];
}

export interface FinishResult {
  finished: boolean;
  labeled: number;
  unlabeled: number;
}

export interface SessionConfig {
  generator: string;
  params: Record<string, unknown>;
  r_unlabeled?: number;
  split_seed?: number;
  preprocess?: string;
  dr_method?: string;
  dr_params?: Record<string, unknown>;
  eta?: number;
}

export interface GeneratorInfo {
  name: string;
  params: Record<string, unknown>;
}

export type Polygon = [number, number][];

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  private base: string;
  private fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // bind so a bare window.fetch doesn't lose its receiver
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `network error: ${(err as Error).message}`);
    }
    let payload: unknown = null;
    try {
      payload = await resp.json();
    } catch {
      // non-JSON body; fall through with the status line only
    }
    if (!resp.ok) {
      const detail =
        payload && typeof payload === "object" && "detail" in payload
          ? String((payload as { detail: unknown }).detail)
          : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return payload as T;
  }

  listGenerators(): Promise<{ generators: GeneratorInfo[] }> {
    return this.request("GET", "/datasets");
  }

  createSession(cfg: SessionConfig): Promise<{ session_id: string; view: ViewPayload }> {
    return this.request("POST", "/sessions", cfg);
  }

  getView(id: string): Promise<{ view: ViewPayload }> {
    return this.request("GET", `/sessions/${id}/view`);
  }

  preview(id: string, polygon: Polygon): Promise<PreviewResult> {
    return this.request("POST", `/sessions/${id}/selection`, { polygon });
  }

  commit(id: string, polygon: Polygon, proposedClass: number | null): Promise<CommitResult> {
    return this.request("POST", `/sessions/${id}/commit`, {
      polygon,
      proposed_class: proposedClass,
    });
  }

  back(id: string): Promise<{ view: ViewPayload }> {
    return this.request("POST", `/sessions/${id}/back`);
  }

  finish(id: string): Promise<FinishResult> {
    return this.request("POST", `/sessions/${id}/finish`);
  }

  exportLabels(id: string): Promise<ExportResult> {
    return this.request("GET", `/sessions/${id}/export`);
  }
}
