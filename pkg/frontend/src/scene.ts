/**
 * Canvas scatter renderer for view payloads.
 *
 * Points are drawn in batches — one path per (status, class) group —
 * so a 10^5-point view costs a handful of fill calls instead of 10^5.
 * Seeds stand out (class color, dark ring, larger); session-assigned
 * points get the class color without the ring; unlabeled points are a
 * neutral gray.
 */

import { dataToScreen, screenToData, Frame, Point } from "./geometry.js";
import { ViewPayload } from "./api.js";

export const STATUS_UNLABELED = 0;
export const STATUS_SEED = 1;
export const STATUS_ASSIGNED = 2;

// category10 minus the gray reserved for unlabeled points
export const CLASS_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#aec7e8",
];
export const UNLABELED_COLOR = "#b0b0b0";
export const SEED_RING = "#222222";

export function classColor(label: number): string {
  return label < 0 ? UNLABELED_COLOR : CLASS_COLORS[label % CLASS_COLORS.length];
}

export interface SceneOptions {
  width?: number;
  height?: number;
  padding?: number;
  pointSize?: number; // unlabeled/assigned marker edge in px
  seedSize?: number; // seed marker radius in px
  background?: string;
  /** Context factory, injectable for tests (jsdom has no 2d context). */
  getContext?: (canvas: HTMLCanvasElement) => CanvasRenderingContext2D;
}

interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  setTransform(a: number, b: number, c: number, d: number, e: number, f: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  rect(x: number, y: number, w: number, h: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
}

export class Scene {
  readonly canvas: HTMLCanvasElement;
  private ctx: Ctx2D;
  private view: ViewPayload | null = null;
  private overlay: Point[] | null = null; // screen-space selection path
  private overlayClosed = false;
  private width: number;
  private height: number;
  private padding: number;
  private pointSize: number;
  private seedSize: number;
  private background: string;

  constructor(canvas: HTMLCanvasElement, opts: SceneOptions = {}) {
    this.canvas = canvas;
    this.width = opts.width ?? 800;
    this.height = opts.height ?? 600;
    this.padding = opts.padding ?? 24;
    this.pointSize = opts.pointSize ?? 4;
    this.seedSize = opts.seedSize ?? 5;
    this.background = opts.background ?? "#ffffff";
    const dpr = typeof devicePixelRatio === "number" ? devicePixelRatio : 1;
    canvas.width = Math.round(this.width * dpr);
    canvas.height = Math.round(this.height * dpr);
    canvas.style.width = `${this.width}px`;
    canvas.style.height = `${this.height}px`;
    const factory = opts.getContext ?? ((c: HTMLCanvasElement) => {
      const ctx = c.getContext("2d");
      if (!ctx) throw new Error("canvas 2d context unavailable");
      return ctx;
    });
    this.ctx = factory(canvas) as unknown as Ctx2D;
    this.ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  }

  frame(): Frame {
    return { width: this.width, height: this.height, padding: this.padding };
  }

  dataToScreen(p: Point): Point {
    return dataToScreen(p, this.frame());
  }

  screenToData(p: Point): Point {
    return screenToData(p, this.frame());
  }

  setView(view: ViewPayload | null): void {
    this.view = view;
  }

  setOverlay(path: Point[] | null, closed = false): void {
    this.overlay = path;
    this.overlayClosed = closed;
  }

  resize(width: number, height: number): void {
    this.width = width;
    this.height = height;
    const dpr = typeof devicePixelRatio === "number" ? devicePixelRatio : 1;
    this.canvas.width = Math.round(width * dpr);
    this.canvas.height = Math.round(height * dpr);
    this.canvas.style.width = `${width}px`;
    this.canvas.style.height = `${height}px`;
    this.ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
    this.draw();
  }

  draw(): void {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.width, this.height);
    ctx.fillStyle = this.background;
    ctx.fillRect(0, 0, this.width, this.height);
    if (this.view) this.drawPoints(this.view);
    if (this.overlay && this.overlay.length > 1) this.drawOverlay(this.overlay);
  }

  /** One batch per (status, class) pair: group, then a single fill each. */
  private drawPoints(view: ViewPayload): void {
    const ctx = this.ctx;
    const frame = this.frame();
    const groups = new Map<string, number[]>();
    for (let i = 0; i < view.points.length; i++) {
      const key = `${view.status[i]}:${view.labels[i]}`;
      let members = groups.get(key);
      if (!members) {
        members = [];
        groups.set(key, members);
      }
      members.push(i);
    }
    // mass points first, seeds on top
    const order = [...groups.keys()].sort((a, b) => {
      const sa = Number(a.split(":")[0]) === STATUS_SEED ? 1 : 0;
      const sb = Number(b.split(":")[0]) === STATUS_SEED ? 1 : 0;
      return sa - sb;
    });
    for (const key of order) {
      const [status, label] = key.split(":").map(Number);
      const members = groups.get(key)!;
      const s = status === STATUS_SEED ? this.seedSize : this.pointSize;
      ctx.beginPath();
      for (const i of members) {
        const [x, y] = dataToScreen(view.points[i], frame);
        if (status === STATUS_SEED) {
          ctx.moveTo(x + s, y);
          ctx.arc(x, y, s, 0, 2 * Math.PI);
        } else {
          ctx.rect(x - s / 2, y - s / 2, s, s);
        }
      }
      ctx.fillStyle = status === STATUS_UNLABELED ? UNLABELED_COLOR : classColor(label);
      ctx.fill();
      if (status === STATUS_SEED) {
        ctx.strokeStyle = SEED_RING;
        ctx.lineWidth = 1.5;
        ctx.stroke();
      }
    }
  }

  private drawOverlay(path: Point[]): void {
    const ctx = this.ctx;
    ctx.beginPath();
    ctx.moveTo(path[0][0], path[0][1]);
    for (let i = 1; i < path.length; i++) ctx.lineTo(path[i][0], path[i][1]);
    if (this.overlayClosed) {
      ctx.closePath();
      ctx.fillStyle = "rgba(31, 119, 180, 0.10)";
      ctx.fill();
    }
    ctx.strokeStyle = "#1f77b4";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
}
