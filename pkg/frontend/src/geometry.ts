/**
 * Screen/data affine maps and selection-path helpers.
 *
 * View payloads arrive normalized to [-1, 1] per axis; the scene maps
 * that square onto the canvas (y flipped, uniform padding).  Everything
 * sent back to the server goes through the inverse map, so the server
 * only ever sees view coordinates.
 */

export type Point = [number, number];

export interface Frame {
  width: number; // canvas CSS width in px
  height: number;
  padding: number;
}

export function dataToScreen(p: Point, frame: Frame): Point {
  const w = frame.width - 2 * frame.padding;
  const h = frame.height - 2 * frame.padding;
  const x = frame.padding + ((p[0] + 1) / 2) * w;
  const y = frame.padding + (1 - (p[1] + 1) / 2) * h;
  return [x, y];
}

export function screenToData(p: Point, frame: Frame): Point {
  const w = frame.width - 2 * frame.padding;
  const h = frame.height - 2 * frame.padding;
  const x = ((p[0] - frame.padding) / w) * 2 - 1;
  const y = (1 - (p[1] - frame.padding) / h) * 2 - 1;
  return [x, y];
}

/** Drop consecutive pointer samples closer than minDist px; keeps endpoints. */
export function decimatePath(path: Point[], minDist: number): Point[] {
  if (path.length <= 2) return path.slice();
  const out: Point[] = [path[0]];
  for (let i = 1; i < path.length - 1; i++) {
    const last = out[out.length - 1];
    const dx = path[i][0] - last[0];
    const dy = path[i][1] - last[1];
    if (dx * dx + dy * dy >= minDist * minDist) out.push(path[i]);
  }
  out.push(path[path.length - 1]);
  return out;
}

/**
 * Turn a freehand pointer path into a closed polygon: the release point
 * joins back to the press point implicitly, so we only drop an exact
 * duplicate tail vertex.  Returns null when fewer than 3 distinct
 * vertices remain (nothing enclosable was drawn).
 */
export function closePath(path: Point[]): Point[] | null {
  let pts = path.slice();
  while (
    pts.length > 1 &&
    pts[0][0] === pts[pts.length - 1][0] &&
    pts[0][1] === pts[pts.length - 1][1]
  ) {
    pts = pts.slice(0, -1);
  }
  if (pts.length < 3) return null;
  return pts;
}

/** Circle tool output: a regular polygon approximating the circle. */
export function circlePolygon(center: Point, radius: number, segments = 64): Point[] {
  const out: Point[] = [];
  for (let i = 0; i < segments; i++) {
    const a = (2 * Math.PI * i) / segments;
    out.push([center[0] + radius * Math.cos(a), center[1] + radius * Math.sin(a)]);
  }
  return out;
}

export function pathBounds(path: Point[]): { min: Point; max: Point } {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const [x, y] of path) {
    if (x < minX) minX = x;
    if (y < minY) minY = y;
    if (x > maxX) maxX = x;
    if (y > maxY) maxY = y;
  }
  return { min: [minX, minY], max: [maxX, maxY] };
}
