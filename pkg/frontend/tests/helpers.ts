/** Shared test doubles: a recording 2d-context stub and a scripted service. */

import { ViewPayload } from "../src/api.js";

export interface CtxOp {
  op: string;
  args: unknown[];
  fillStyle?: string;
  strokeStyle?: string;
}

/** Minimal CanvasRenderingContext2D stand-in that records every call. */
export class RecordingContext {
  ops: CtxOp[] = [];
  fillStyle = "#000000";
  strokeStyle = "#000000";
  lineWidth = 1;

  private log(op: string, ...args: unknown[]): void {
    this.ops.push({
      op,
      args,
      fillStyle: String(this.fillStyle),
      strokeStyle: String(this.strokeStyle),
    });
  }

  setTransform(...args: unknown[]): void { this.log("setTransform", ...args); }
  clearRect(...args: unknown[]): void { this.log("clearRect", ...args); }
  fillRect(...args: unknown[]): void { this.log("fillRect", ...args); }
  beginPath(): void { this.log("beginPath"); }
  rect(...args: unknown[]): void { this.log("rect", ...args); }
  arc(...args: unknown[]): void { this.log("arc", ...args); }
  moveTo(...args: unknown[]): void { this.log("moveTo", ...args); }
  lineTo(...args: unknown[]): void { this.log("lineTo", ...args); }
  closePath(): void { this.log("closePath"); }
  fill(): void { this.log("fill"); }
  stroke(): void { this.log("stroke"); }

  calls(op: string): CtxOp[] {
    return this.ops.filter((o) => o.op === op);
  }

  reset(): void {
    this.ops = [];
  }
}

export function recordingFactory(): { ctx: RecordingContext; getContext: () => RecordingContext } {
  const ctx = new RecordingContext();
  return { ctx, getContext: () => ctx };
}

export function makeView(overrides: Partial<ViewPayload> = {}): ViewPayload {
  return {
    view_id: 0,
    depth: 1,
    n: 3,
    points: [[-0.5, -0.5], [0, 0], [0.5, 0.5]],
    status: [0, 1, 2],
    labels: [-1, 0, 0],
    lineage: [["root", {}, 3]],
    can_go_back: false,
    class_count: 2,
    eta: 0.85,
    unlabeled_total: 1,
    ...overrides,
  };
}

export interface ServiceCall {
  method: string;
  path: string;
  body: unknown;
}

type Handler = (body: unknown, call: ServiceCall) => [number, unknown];

/**
 * Scripted HTTP double for the client.  Routes are matched by
 * "METHOD /path-with-:id" after stripping the session id, and each
 * route pops responses off a queue (last response sticks).
 */
export class FakeService {
  calls: ServiceCall[] = [];
  private routes = new Map<string, Handler[]>();

  on(method: string, path: string, handler: Handler): this {
    const key = `${method} ${path}`;
    const queue = this.routes.get(key) ?? [];
    queue.push(handler);
    this.routes.set(key, queue);
    return this;
  }

  fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, "http://fake");
    const method = (init?.method ?? "GET").toUpperCase();
    // normalize /sessions/<id>/rest -> /sessions/:id/rest
    const path = url.pathname.replace(/\/sessions\/[^/]+/, "/sessions/:id");
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    const call = { method, path, body };
    this.calls.push(call);
    const queue = this.routes.get(`${method} ${path}`);
    if (!queue || queue.length === 0) {
      return jsonResponse(404, { detail: `no fake route for ${method} ${path}` });
    }
    const handler = queue.length > 1 ? queue.shift()! : queue[0];
    const [status, payload] = handler(body, call);
    return jsonResponse(status, payload);
  };

  mutatingCalls(): ServiceCall[] {
    return this.calls.filter((c) => c.method === "POST" && !c.path.endsWith("/selection"));
  }
}

export function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  what = "condition",
): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 10));
  }
}
