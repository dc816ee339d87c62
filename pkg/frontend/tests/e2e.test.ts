// @vitest-environment jsdom
//
// End-to-end: a scripted browser session against a live service on the
// four-class dataset.  The script lassos a pure blob (labeled), lassos
// the overlapped blob pair (child view), and finishes.  The transcript
// the UI recorded is then replayed through the raw API and must export
// an identical ledger, with every preview histogram matching.

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client, PreviewResult, ViewPayload } from "../src/api.js";
import { Point, pathBounds } from "../src/geometry.js";
import { initApp, AppHandle } from "../src/main.js";
import { panelHistogram } from "../src/panel.js";
import { replayTranscript } from "../src/replay.js";
import { recordingFactory, waitFor } from "./helpers.js";

const PORT = 8900 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let app: AppHandle;
let root: HTMLElement;

async function serverReady(timeoutMs = 30_000): Promise<void> {
  const start = Date.now();
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/datasets`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() - start > timeoutMs) throw new Error("service did not come up");
    await new Promise((r) => setTimeout(r, 200));
  }
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "sl-e2e-"));
  server = spawn(
    "scatterlabel",
    ["serve", "--host", "127.0.0.1", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  await serverReady();

  root = document.createElement("div");
  document.body.appendChild(root);
  const { getContext } = recordingFactory();
  app = initApp(root, {
    baseUrl: BASE,
    fetchFn: (input, init) => fetch(input, init),
    scene: {
      width: 800,
      height: 600,
      padding: 24,
      getContext: getContext as unknown as (c: HTMLCanvasElement) => CanvasRenderingContext2D,
    },
  });
});

afterAll(() => {
  app?.destroy();
  root?.remove();
  server?.kill();
});

/** Drive a drag the way the app listens for it (pointer or mouse). */
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

/** Screen-space rectangle around the given classes' seed points. */
function lassoAroundSeeds(view: ViewPayload, classes: number[], grow: number): Point[] {
  const seeds: Point[] = [];
  for (let i = 0; i < view.points.length; i++) {
    if (view.status[i] === 1 && classes.includes(view.labels[i])) {
      seeds.push(view.points[i]);
    }
  }
  expect(seeds.length).toBeGreaterThan(0);
  const { min, max } = pathBounds(seeds);
  const cx = (min[0] + max[0]) / 2;
  const cy = (min[1] + max[1]) / 2;
  const hx = Math.max(((max[0] - min[0]) / 2) * grow, 0.02);
  const hy = Math.max(((max[1] - min[1]) / 2) * grow, 0.02);
  const corners: Point[] = [
    [cx - hx, cy - hy], [cx + hx, cy - hy], [cx + hx, cy + hy], [cx - hx, cy + hy],
  ];
  // a few interior samples per edge, like a real pointer trail
  const path: Point[] = [];
  for (let e = 0; e < 4; e++) {
    const a = corners[e];
    const b = corners[(e + 1) % 4];
    for (let t = 0; t < 3; t++) {
      path.push([a[0] + ((b[0] - a[0]) * t) / 3, a[1] + ((b[1] - a[1]) * t) / 3]);
    }
  }
  return path.map((p) => app.scene.dataToScreen(p));
}

async function lassoAndPreview(classes: number[], grow: number): Promise<PreviewResult> {
  const view = app.controller.state.view!;
  drag(app.el.canvas, lassoAroundSeeds(view, classes, grow));
  await waitFor(
    () => app.controller.state.preview !== null && !app.controller.state.previewPending,
    20_000,
    "preview",
  );
  return app.controller.state.preview!;
}

/** The displayed histogram must equal a fresh raw-API answer for the same polygon. */
async function checkHistogramAgainstServer(): Promise<void> {
  const raw = new Client(BASE);
  const sid = app.controller.state.sessionId!;
  const polygon = app.controller.state.polygon!;
  const server = await raw.preview(sid, polygon);
  expect(panelHistogram(app.el.panel)).toEqual(server.histogram);
}

describe("scripted browser session on the four-class dataset", () => {
  it("runs the pure-blob / overlapped-blob / finish loop and replays bit-equal", async () => {
    // -- start ------------------------------------------------------------
    app.el.params.value = '{"n_per_class": 120, "seed": 0}';
    app.el.rInput.value = "0.9";
    app.el.etaInput.value = "0.85";
    app.el.start.click();
    await waitFor(() => app.controller.state.view !== null, 30_000, "session view");
    const view0 = app.controller.state.view!;
    expect(view0.n).toBe(480);
    expect(view0.depth).toBe(1);
    expect(view0.class_count).toBe(4);

    // -- lasso the far, pure blob (class 2) --------------------------------
    const preview1 = await lassoAndPreview([2], 2.2);
    expect(preview1.histogram).toEqual({ "2": 12 }); // 12 seeds per class at r=0.9
    expect(preview1.purity).toBe(1.0);
    await checkHistogramAgainstServer();

    app.el.confirm.click();
    await waitFor(() => app.controller.state.lastOutcome !== null, 20_000, "labeled outcome");
    const out1 = app.controller.state.lastOutcome!;
    expect(out1.outcome).toBe("labeled");
    expect(out1.assigned_class).toBe(2);
    // statuses repainted: the blob's members are now assigned
    expect(app.controller.state.view!.status).toContain(2);
    expect(app.el.outcome.textContent).toContain("labeled class 2");

    // -- lasso the overlapped blob pair (classes 0 and 1) -------------------
    const preview2 = await lassoAndPreview([0, 1], 1.6);
    expect(preview2.histogram["0"]).toBe(12);
    expect(preview2.histogram["1"]).toBe(12);
    expect(preview2.purity!).toBeLessThan(view0.eta);
    await checkHistogramAgainstServer();

    app.el.confirm.click();
    await waitFor(() => app.controller.state.view?.depth === 2, 20_000, "child view");
    expect(app.controller.state.lastOutcome?.outcome).toBe("reprojected");
    expect(app.el.crumbs.querySelectorAll(".sl-crumb")).toHaveLength(2);
    expect(app.el.back.disabled).toBe(false);
    // the child view holds the lassoed subset, not the whole dataset
    expect(app.controller.state.view!.n).toBeLessThan(480);
    expect(app.controller.state.view!.n).toBeGreaterThanOrEqual(240);

    // -- finish -------------------------------------------------------------
    app.el.finish.click();
    await waitFor(() => app.controller.state.finished, 20_000, "finish");
    const uiExport = app.controller.state.exported!;
    // export covers every seed or assigned sample: 48 seeds + the labeled blob
    expect(uiExport.indices.length).toBeGreaterThanOrEqual(48 + 50);
    expect(uiExport.labels.length).toBe(uiExport.indices.length);
    expect(uiExport.status.length).toBe(uiExport.indices.length);
    const assigned = uiExport.status.filter((s) => s === 2).length;
    expect(assigned).toBeGreaterThan(50);
    expect(uiExport.status.filter((s) => s === 1)).toHaveLength(48);
    expect(JSON.parse(app.el.exportPre.textContent ?? "")).toEqual(uiExport);

    // -- replay the recorded transcript through the raw API -----------------
    const transcriptOps = app.controller.transcript.map((s) => s.op);
    expect(transcriptOps).toEqual([
      "create", "selection", "commit", "selection", "commit", "finish",
    ]);
    const replay = await replayTranscript(new Client(BASE), app.controller.transcript);
    expect(replay.previews).toHaveLength(2);
    expect(replay.histogramMismatches).toEqual([]);
    expect(replay.exported).toEqual(uiExport);
  });
});
