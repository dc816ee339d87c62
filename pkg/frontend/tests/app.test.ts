// @vitest-environment jsdom
import { afterEach, describe, expect, it } from "vitest";

import { Point } from "../src/geometry.js";
import { initApp, AppHandle } from "../src/main.js";
import { panelHistogram } from "../src/panel.js";
import { FakeService, makeView, RecordingContext, recordingFactory, waitFor } from "./helpers.js";

let mounted: { root: HTMLElement; app: AppHandle }[] = [];

afterEach(() => {
  for (const { root, app } of mounted) {
    app.destroy();
    root.remove();
  }
  mounted = [];
});

function boot(svc: FakeService): { app: AppHandle; ctx: RecordingContext } {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const { ctx, getContext } = recordingFactory();
  const app = initApp(root, {
    baseUrl: "http://svc",
    fetchFn: svc.fetchFn,
    scene: {
      width: 800,
      height: 600,
      padding: 24,
      getContext: getContext as unknown as (c: HTMLCanvasElement) => CanvasRenderingContext2D,
    },
  });
  mounted.push({ root, app });
  return { app, ctx };
}

/** Dispatch a drag exactly the way the app listens for it. */
function drag(canvas: HTMLCanvasElement, pts: Point[]): void {
  const hasPointer = typeof PointerEvent !== "undefined";
  const mk = (kind: "down" | "move" | "up", [x, y]: Point): Event => {
    const init = { clientX: x, clientY: y, bubbles: true };
    return hasPointer
      ? new PointerEvent(`pointer${kind}`, init)
      : new MouseEvent(`mouse${kind}`, init);
  };
  canvas.dispatchEvent(mk("down", pts[0]));
  for (const p of pts.slice(1, -1)) canvas.dispatchEvent(mk("move", p));
  canvas.dispatchEvent(mk("up", pts[pts.length - 1]));
}

function fullService(): FakeService {
  const svc = new FakeService();
  svc.on("POST", "/sessions", () => [201, { session_id: "s1", view: makeView() }]);
  svc.on("POST", "/sessions/:id/selection", () => [
    200, { member_count: 10, histogram: { "0": 8, "1": 2 }, majority: 0, purity: 0.8 },
  ]);
  return svc;
}

async function startSession(app: AppHandle): Promise<void> {
  app.el.params.value = '{"n_per_class": 10, "seed": 0}';
  app.el.start.click();
  await waitFor(() => app.controller.state.view !== null, 2000, "session view");
}

const BOX: Point[] = [
  [100, 100], [300, 100], [300, 120], [300, 300], [100, 300], [100, 150],
];

describe("session start", () => {
  it("creates the session from the form and paints the view", async () => {
    const svc = fullService();
    const { app, ctx } = boot(svc);
    await startSession(app);
    const create = svc.calls.find((c) => c.path === "/sessions");
    expect(create?.body).toMatchObject({
      generator: "four_gaussians",
      params: { n_per_class: 10, seed: 0 },
      r_unlabeled: 0.9,
      eta: 0.85,
      dr_method: "pca",
    });
    expect(ctx.calls("fill").length).toBeGreaterThan(0);
    expect(app.el.counters.textContent).toContain("3 points");
    // propose options: none + one per class
    expect(app.el.propose.querySelectorAll("option")).toHaveLength(3);
    expect(app.el.finish.disabled).toBe(false);
    expect(app.el.back.disabled).toBe(true); // root view
  });

  it("rejects malformed params without calling the server", () => {
    const svc = fullService();
    const { app } = boot(svc);
    app.el.params.value = "{not json";
    app.el.start.click();
    expect(app.el.notice.textContent).toContain("params must be JSON");
    expect(svc.calls).toHaveLength(0);
  });
});

describe("lasso selection", () => {
  it("closes the drag into a polygon, previews it, and enables confirm", async () => {
    const svc = fullService();
    const { app } = boot(svc);
    await startSession(app);
    drag(app.el.canvas, BOX);
    await waitFor(() => app.controller.state.preview !== null, 2000, "preview");
    const sel = svc.calls.find((c) => c.path.endsWith("/selection"));
    const body = sel?.body as { polygon: [number, number][] };
    expect(body.polygon.length).toBeGreaterThanOrEqual(3);
    // polygon went out in view coordinates, inside the unit square here
    for (const [x, y] of body.polygon) {
      expect(Math.abs(x)).toBeLessThanOrEqual(1);
      expect(Math.abs(y)).toBeLessThanOrEqual(1);
    }
    expect(panelHistogram(app.el.panel)).toEqual({ "0": 8, "1": 2 });
    expect(app.el.panel.textContent).toContain("purity 0.800");
    expect(app.el.confirm.disabled).toBe(false);
  });

  it("ignores a degenerate two-point drag", async () => {
    const svc = fullService();
    const { app } = boot(svc);
    await startSession(app);
    drag(app.el.canvas, [[100, 100], [101, 100]]);
    await new Promise((r) => setTimeout(r, 30));
    expect(svc.calls.filter((c) => c.path.endsWith("/selection"))).toHaveLength(0);
    expect(app.controller.state.polygon).toBeNull();
  });

  it("shows the empty-selection notice and keeps confirm disabled", async () => {
    const svc = new FakeService();
    svc.on("POST", "/sessions", () => [201, { session_id: "s1", view: makeView() }]);
    svc.on("POST", "/sessions/:id/selection", () => [
      200, { member_count: 0, histogram: {}, majority: null, purity: null,
        empty_reason: "selection contains no points" },
    ]);
    const { app } = boot(svc);
    await startSession(app);
    drag(app.el.canvas, BOX);
    await waitFor(() => app.controller.state.notice !== null, 2000, "notice");
    expect(app.el.notice.textContent).toContain("empty selection");
    expect(app.el.confirm.disabled).toBe(true);
  });

  it("the circle tool serializes to a 64-gon", async () => {
    const svc = fullService();
    const { app } = boot(svc);
    await startSession(app);
    app.el.toolCircle.click();
    drag(app.el.canvas, [[400, 300], [400, 250], [460, 300]]);
    await waitFor(() => app.controller.state.preview !== null, 2000, "preview");
    const sel = svc.calls.find((c) => c.path.endsWith("/selection"));
    expect((sel?.body as { polygon: unknown[] }).polygon).toHaveLength(64);
  });
});

describe("commit flow", () => {
  it("sends the previewed polygon verbatim and reports a labeled outcome", async () => {
    const svc = fullService();
    svc.on("POST", "/sessions/:id/commit", () => [
      200,
      {
        outcome: "labeled", assigned_class: 0, member_count: 10,
        reason: "purity 0.800 >= eta", override: false,
        view: makeView({ status: [2, 1, 2], labels: [0, 0, 0], unlabeled_total: 0 }),
      },
    ]);
    const { app } = boot(svc);
    await startSession(app);
    drag(app.el.canvas, BOX);
    await waitFor(() => app.controller.state.preview !== null, 2000, "preview");
    app.el.confirm.click();
    await waitFor(() => app.controller.state.lastOutcome !== null, 2000, "outcome");
    const sel = svc.calls.find((c) => c.path.endsWith("/selection"));
    const commit = svc.calls.find((c) => c.path.endsWith("/commit"));
    expect(JSON.stringify((commit?.body as { polygon: unknown }).polygon)).toBe(
      JSON.stringify((sel?.body as { polygon: unknown }).polygon),
    );
    expect(app.el.outcome.textContent).toBe("labeled class 0 (10 points)");
    // repaint: statuses now carry assignments
    expect(app.controller.state.view?.status).toEqual([2, 1, 2]);
    expect(app.el.confirm.disabled).toBe(true); // selection consumed
  });

  it("an impure commit lands in the child view with a deeper breadcrumb", async () => {
    const svc = fullService();
    svc.on("POST", "/sessions/:id/commit", () => [
      200,
      {
        outcome: "reprojected", assigned_class: null, member_count: 6,
        reason: "purity 0.500 < eta 0.850", override: false,
        view: makeView({
          view_id: 1, depth: 2, can_go_back: true,
          lineage: [["root", {}, 3], ["reproject", {}, 2]],
        }),
      },
    ]);
    const { app } = boot(svc);
    await startSession(app);
    expect(app.el.crumbs.querySelectorAll(".sl-crumb")).toHaveLength(1);
    drag(app.el.canvas, BOX);
    await waitFor(() => app.controller.state.preview !== null, 2000, "preview");
    app.el.confirm.click();
    await waitFor(() => app.controller.state.lastOutcome !== null, 2000, "outcome");
    expect(app.controller.state.view?.depth).toBe(2);
    expect(app.el.crumbs.querySelectorAll(".sl-crumb")).toHaveLength(2);
    expect(app.el.crumbs.textContent).toContain("›");
    expect(app.el.outcome.textContent).toContain("child view");
    expect(app.el.back.disabled).toBe(false);
  });

  it("surfaces commit errors inline", async () => {
    const svc = fullService();
    svc.on("POST", "/sessions/:id/commit", () => [
      422, { detail: "selection collapses to a degenerate region" },
    ]);
    const { app } = boot(svc);
    await startSession(app);
    drag(app.el.canvas, BOX);
    await waitFor(() => app.controller.state.preview !== null, 2000, "preview");
    app.el.confirm.click();
    await waitFor(() => app.controller.state.notice !== null, 2000, "notice");
    expect(app.el.notice.textContent).toContain("degenerate region");
  });
});

describe("finish", () => {
  it("freezes the session and prints the exported ledger", async () => {
    const svc = fullService();
    svc.on("POST", "/sessions/:id/finish", () => [
      200, { finished: true, labeled: 2, unlabeled: 1 },
    ]);
    const exported = { indices: [0, 1, 2], labels: [0, 0, -1], status: [1, 2, 0] };
    svc.on("GET", "/sessions/:id/export", () => [200, exported]);
    const { app } = boot(svc);
    await startSession(app);
    app.el.finish.click();
    await waitFor(() => app.controller.state.finished, 2000, "finish");
    expect(JSON.parse(app.el.exportPre.textContent ?? "")).toEqual(exported);
    expect(app.el.finish.disabled).toBe(true);
    expect(app.el.confirm.disabled).toBe(true);
  });
});
