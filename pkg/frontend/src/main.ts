/**
 * App wiring: DOM scaffold, pointer handling, controller/scene glue.
 *
 * initApp builds the whole page under a root element and returns the
 * live pieces, so both the browser entry point at the bottom and the
 * scripted end-to-end test drive the exact same code path.
 */

import { Client, SessionConfig } from "./api.js";
import { circlePolygon, closePath, decimatePath, Point } from "./geometry.js";
import { renderPanel } from "./panel.js";
import { Scene, SceneOptions, classColor } from "./scene.js";
import { SessionController } from "./state.js";

export interface AppOptions {
  baseUrl: string;
  fetchFn?: (input: string, init?: RequestInit) => Promise<Response>;
  scene?: SceneOptions;
}

export interface AppElements {
  root: HTMLElement;
  canvas: HTMLCanvasElement;
  panel: HTMLElement;
  notice: HTMLElement;
  outcome: HTMLElement;
  counters: HTMLElement;
  crumbs: HTMLElement;
  legend: HTMLElement;
  generator: HTMLSelectElement;
  params: HTMLInputElement;
  rInput: HTMLInputElement;
  etaInput: HTMLInputElement;
  drSelect: HTMLSelectElement;
  start: HTMLButtonElement;
  toolLasso: HTMLButtonElement;
  toolCircle: HTMLButtonElement;
  propose: HTMLSelectElement;
  confirm: HTMLButtonElement;
  clear: HTMLButtonElement;
  back: HTMLButtonElement;
  finish: HTMLButtonElement;
  exportPre: HTMLElement;
}

export interface AppHandle {
  controller: SessionController;
  scene: Scene;
  el: AppElements;
  destroy: () => void;
}

type Tool = "lasso" | "circle";

const STYLE = `
.sl-app { font: 13px/1.45 system-ui, sans-serif; color: #222; }
.sl-toolbar, .sl-actions { display: flex; gap: 6px; align-items: center; flex-wrap: wrap; margin: 4px 0; }
.sl-toolbar input, .sl-toolbar select { font: inherit; padding: 1px 4px; }
.sl-body { display: flex; gap: 10px; align-items: flex-start; }
.sl-canvas { border: 1px solid #ccc; cursor: crosshair; touch-action: none; }
.sl-side { width: 260px; }
.sl-crumbs { margin: 4px 0; color: #555; }
.sl-crumb { cursor: default; }
.sl-notice { color: #b00020; min-height: 1.2em; }
.sl-outcome { color: #1a6b1a; min-height: 1.2em; }
.sl-hist-row { display: flex; gap: 6px; align-items: center; margin: 2px 0; }
.sl-hist-chip { width: 10px; height: 10px; display: inline-block; border-radius: 2px; }
.sl-hist-bar { height: 8px; display: inline-block; border-radius: 2px; }
.sl-hist-count { margin-left: auto; font-variant-numeric: tabular-nums; }
.sl-evidence-foot { margin-top: 4px; color: #555; }
.sl-export { max-height: 180px; overflow: auto; background: #f6f6f6; padding: 4px; }
.sl-tool.active { background: #1f77b4; color: #fff; }
.sl-legend span { margin-right: 10px; }
`;

function button(doc: Document, id: string, label: string): HTMLButtonElement {
  const b = doc.createElement("button");
  b.id = id;
  b.textContent = label;
  b.type = "button";
  return b;
}

export function initApp(root: HTMLElement, opts: AppOptions): AppHandle {
  const doc = root.ownerDocument;
  const client = new Client(opts.baseUrl, opts.fetchFn);
  const controller = new SessionController(client);

  if (!doc.getElementById("sl-style")) {
    const style = doc.createElement("style");
    style.id = "sl-style";
    style.textContent = STYLE;
    doc.head.appendChild(style);
  }

  root.classList.add("sl-app");
  root.textContent = "";

  // --- toolbar -----------------------------------------------------------
  const toolbar = doc.createElement("div");
  toolbar.className = "sl-toolbar";
  const generator = doc.createElement("select");
  generator.id = "sl-generator";
  for (const name of ["four_gaussians", "two_moons", "x_shape"]) {
    const o = doc.createElement("option");
    o.value = name;
    o.textContent = name;
    generator.appendChild(o);
  }
  const params = doc.createElement("input");
  params.id = "sl-params";
  params.size = 26;
  params.value = '{"n_per_class": 100, "seed": 0}';
  const rInput = doc.createElement("input");
  rInput.id = "sl-r";
  rInput.size = 5;
  rInput.value = "0.9";
  rInput.title = "unlabeled rate";
  const etaInput = doc.createElement("input");
  etaInput.id = "sl-eta";
  etaInput.size = 5;
  etaInput.value = "0.85";
  etaInput.title = "purity threshold";
  const drSelect = doc.createElement("select");
  drSelect.id = "sl-dr";
  for (const name of ["pca", "isomap", "tsne"]) {
    const o = doc.createElement("option");
    o.value = name;
    o.textContent = name;
    drSelect.appendChild(o);
  }
  const start = button(doc, "sl-start", "start session");
  const toolLasso = button(doc, "sl-tool-lasso", "lasso");
  toolLasso.className = "sl-tool active";
  const toolCircle = button(doc, "sl-tool-circle", "circle");
  toolCircle.className = "sl-tool";
  toolbar.append(generator, params, rInput, etaInput, drSelect, start, toolLasso, toolCircle);

  const crumbs = doc.createElement("div");
  crumbs.className = "sl-crumbs";
  crumbs.id = "sl-crumbs";

  // --- canvas + side panel ----------------------------------------------
  const body = doc.createElement("div");
  body.className = "sl-body";
  const canvas = doc.createElement("canvas");
  canvas.id = "sl-canvas";
  canvas.className = "sl-canvas";
  const side = doc.createElement("div");
  side.className = "sl-side";

  const notice = doc.createElement("div");
  notice.className = "sl-notice";
  notice.id = "sl-notice";
  const panel = doc.createElement("div");
  panel.id = "sl-panel";

  const actions = doc.createElement("div");
  actions.className = "sl-actions";
  const propose = doc.createElement("select");
  propose.id = "sl-propose";
  const confirm = button(doc, "sl-confirm", "confirm");
  confirm.disabled = true;
  const clear = button(doc, "sl-clear", "clear");
  const back = button(doc, "sl-back", "back");
  back.disabled = true;
  const finish = button(doc, "sl-finish", "finish");
  finish.disabled = true;
  actions.append(propose, confirm, clear, back, finish);

  const outcome = doc.createElement("div");
  outcome.className = "sl-outcome";
  outcome.id = "sl-outcome";
  const counters = doc.createElement("div");
  counters.id = "sl-counters";
  const legend = doc.createElement("div");
  legend.className = "sl-legend";
  legend.id = "sl-legend";
  const exportPre = doc.createElement("pre");
  exportPre.className = "sl-export";
  exportPre.id = "sl-export";

  side.append(notice, panel, actions, outcome, counters, legend, exportPre);
  body.append(canvas, side);
  root.append(toolbar, crumbs, body);

  const scene = new Scene(canvas, opts.scene);

  // --- selection drawing ---------------------------------------------------
  let tool: Tool = "lasso";
  let dragging = false;
  let path: Point[] = []; // screen coords while dragging
  let circleCenter: Point | null = null;

  function canvasPoint(ev: { clientX: number; clientY: number }): Point {
    const rect = canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  function onDown(ev: MouseEvent): void {
    if (!controller.state.view || controller.state.finished) return;
    dragging = true;
    controller.clearSelection();
    const p = canvasPoint(ev);
    if (tool === "lasso") {
      path = [p];
    } else {
      circleCenter = p;
      path = [];
    }
    scene.setOverlay(path.slice(), false);
    scene.draw();
  }

  function onMove(ev: MouseEvent): void {
    if (!dragging) return;
    const p = canvasPoint(ev);
    if (tool === "lasso") {
      path.push(p);
      scene.setOverlay(decimatePath(path, 2), false);
    } else if (circleCenter) {
      const r = Math.hypot(p[0] - circleCenter[0], p[1] - circleCenter[1]);
      scene.setOverlay(circlePolygon(circleCenter, r, 64), true);
    }
    scene.draw();
  }

  function onUp(ev: MouseEvent): void {
    if (!dragging) return;
    dragging = false;
    const p = canvasPoint(ev);
    let screenPoly: Point[] | null = null;
    if (tool === "lasso") {
      path.push(p);
      screenPoly = closePath(decimatePath(path, 2));
    } else if (circleCenter) {
      const r = Math.hypot(p[0] - circleCenter[0], p[1] - circleCenter[1]);
      if (r > 2) screenPoly = circlePolygon(circleCenter, r, 64);
      circleCenter = null;
    }
    path = [];
    if (!screenPoly) {
      scene.setOverlay(null);
      scene.draw();
      return;
    }
    scene.setOverlay(screenPoly, true);
    scene.draw();
    const dataPoly = screenPoly.map((q) => scene.screenToData(q)) as [number, number][];
    void controller.setSelection(dataPoly);
  }

  // Pointer events when the browser has them; mouse events otherwise.
  const down = typeof PointerEvent !== "undefined" ? "pointerdown" : "mousedown";
  const move = typeof PointerEvent !== "undefined" ? "pointermove" : "mousemove";
  const up = typeof PointerEvent !== "undefined" ? "pointerup" : "mouseup";
  canvas.addEventListener(down, onDown as EventListener);
  canvas.addEventListener(move, onMove as EventListener);
  canvas.addEventListener(up, onUp as EventListener);

  // --- controls ------------------------------------------------------------
  function sessionConfig(): SessionConfig {
    let parsed: Record<string, unknown>;
    try {
      parsed = JSON.parse(params.value);
    } catch {
      throw new Error("params must be JSON");
    }
    return {
      generator: generator.value,
      params: parsed,
      r_unlabeled: Number(rInput.value),
      split_seed: 0,
      preprocess: "zscore",
      dr_method: drSelect.value,
      dr_params: {},
      eta: Number(etaInput.value),
    };
  }

  start.addEventListener("click", () => {
    let cfg: SessionConfig;
    try {
      cfg = sessionConfig();
    } catch (err) {
      notice.textContent = String((err as Error).message);
      return;
    }
    void controller.createSession(cfg);
  });
  toolLasso.addEventListener("click", () => {
    tool = "lasso";
    toolLasso.classList.add("active");
    toolCircle.classList.remove("active");
  });
  toolCircle.addEventListener("click", () => {
    tool = "circle";
    toolCircle.classList.add("active");
    toolLasso.classList.remove("active");
  });
  confirm.addEventListener("click", () => {
    const v = propose.value;
    void controller.confirm(v === "" ? null : Number(v));
  });
  clear.addEventListener("click", () => {
    controller.clearSelection();
  });
  back.addEventListener("click", () => {
    void controller.goBack();
  });
  finish.addEventListener("click", () => {
    void controller.finish();
  });

  // --- render --------------------------------------------------------------
  function renderCrumbs(): void {
    crumbs.textContent = "";
    controller.state.crumbs.forEach((crumb, i) => {
      if (i > 0) crumbs.appendChild(doc.createTextNode(" › "));
      const span = doc.createElement("span");
      span.className = "sl-crumb";
      span.textContent = i === 0 ? `root (${crumb.n})` : `reproject (${crumb.n})`;
      crumbs.appendChild(span);
    });
  }

  function renderProposeOptions(classCount: number): void {
    propose.textContent = "";
    const none = doc.createElement("option");
    none.value = "";
    none.textContent = "no proposal";
    propose.appendChild(none);
    for (let c = 0; c < classCount; c++) {
      const o = doc.createElement("option");
      o.value = String(c);
      o.textContent = `propose ${c}`;
      propose.appendChild(o);
    }
  }

  function renderLegend(classCount: number): void {
    legend.textContent = "";
    const mk = (text: string, color: string) => {
      const s = doc.createElement("span");
      const chip = doc.createElement("span");
      chip.className = "sl-hist-chip";
      chip.style.background = color;
      s.append(chip, doc.createTextNode(" " + text));
      return s;
    };
    legend.appendChild(mk("unlabeled", "#b0b0b0"));
    for (let c = 0; c < classCount; c++) legend.appendChild(mk(`class ${c}`, classColor(c)));
  }

  let lastClassCount = -1;
  function render(): void {
    const s = controller.state;
    scene.setView(s.view);
    if (!s.polygon && !dragging) scene.setOverlay(null);
    scene.draw();
    renderCrumbs();
    if (s.view && s.view.class_count !== lastClassCount) {
      lastClassCount = s.view.class_count;
      renderProposeOptions(lastClassCount);
      renderLegend(lastClassCount);
    }
    notice.textContent = s.notice ?? "";
    renderPanel(panel, s.preview, s.previewPending, s.view ? s.view.eta : null);
    confirm.disabled = !controller.canConfirm();
    back.disabled = s.busy || !s.view || !s.view.can_go_back || s.finished;
    finish.disabled = s.busy || !s.view || s.finished;
    start.disabled = s.busy;
    if (s.lastOutcome) {
      const o = s.lastOutcome;
      outcome.textContent =
        o.outcome === "labeled"
          ? `labeled class ${o.assigned_class} (${o.member_count} points)`
          : o.outcome === "reprojected"
            ? `impure selection (${o.reason}) — opened child view`
            : `rejected: ${o.reason}`;
    } else {
      outcome.textContent = "";
    }
    counters.textContent = s.view
      ? `view ${s.view.view_id} · depth ${s.view.depth} · ${s.view.n} points · ` +
        `${s.view.unlabeled_total} unlabeled overall · ` +
        `projector ${s.view.lineage.map((step) => step[0]).join("→")}`
      : "";
    exportPre.textContent = s.exported ? JSON.stringify(s.exported) : "";
  }
  controller.onChange = render;
  render();

  return {
    controller,
    scene,
    el: {
      root, canvas, panel, notice, outcome, counters, crumbs, legend,
      generator, params, rInput, etaInput, drSelect, start,
      toolLasso, toolCircle, propose, confirm, clear, back, finish,
      exportPre,
    },
    destroy(): void {
      canvas.removeEventListener(down, onDown as EventListener);
      canvas.removeEventListener(move, onMove as EventListener);
      canvas.removeEventListener(up, onUp as EventListener);
      controller.onChange = null;
    },
  };
}

// Browser entry point: mount on #app against a same-origin service.
if (typeof document !== "undefined") {
  const mount = document.getElementById("app");
  if (mount) {
    initApp(mount, { baseUrl: "" });
  }
}
