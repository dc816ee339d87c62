/**
 * Evidence panel: renders the server's preview for the pending polygon.
 *
 * Pure pass-through — the histogram, majority and purity shown are the
 * server's numbers verbatim; the panel only formats them next to η so
 * the annotator can see what a commit would be judged against.
 */

import { PreviewResult } from "./api.js";
import { classColor } from "./scene.js";

function fmt(x: number): string {
  return x.toFixed(3);
}

export function renderPanel(
  el: HTMLElement,
  preview: PreviewResult | null,
  pending: boolean,
  eta: number | null,
): void {
  el.textContent = "";
  if (pending) {
    const p = el.ownerDocument.createElement("div");
    p.className = "sl-pending";
    p.textContent = "fetching evidence…";
    el.appendChild(p);
    return;
  }
  if (!preview) return;
  const doc = el.ownerDocument;

  const head = doc.createElement("div");
  head.className = "sl-evidence-head";
  head.textContent = `${preview.member_count} points selected`;
  el.appendChild(head);

  const keys = Object.keys(preview.histogram).sort((a, b) => Number(a) - Number(b));
  const total = keys.reduce((acc, k) => acc + preview.histogram[k], 0);
  for (const k of keys) {
    const count = preview.histogram[k];
    const row = doc.createElement("div");
    row.className = "sl-hist-row";
    row.dataset.class = k;
    const chip = doc.createElement("span");
    chip.className = "sl-hist-chip";
    chip.style.background = classColor(Number(k));
    const label = doc.createElement("span");
    label.className = "sl-hist-label";
    label.textContent = `class ${k}`;
    const bar = doc.createElement("span");
    bar.className = "sl-hist-bar";
    bar.style.width = `${Math.round((100 * count) / Math.max(total, 1))}px`;
    bar.style.background = classColor(Number(k));
    const n = doc.createElement("span");
    n.className = "sl-hist-count";
    n.textContent = String(count);
    row.append(chip, label, bar, n);
    el.appendChild(row);
  }
  if (keys.length === 0 && preview.member_count > 0) {
    const none = doc.createElement("div");
    none.className = "sl-hist-empty";
    none.textContent = "no labeled evidence in selection";
    el.appendChild(none);
  }

  const foot = doc.createElement("div");
  foot.className = "sl-evidence-foot";
  if (preview.purity !== null && preview.majority !== null) {
    const etaTxt = eta !== null ? ` · η ${fmt(eta)}` : "";
    foot.textContent =
      `majority class ${preview.majority} · purity ${fmt(preview.purity)}${etaTxt}`;
  } else if (preview.member_count > 0) {
    foot.textContent = "purity undefined (no evidence)";
  }
  el.appendChild(foot);
}

/** Read the histogram back out of a rendered panel (used by tests). */
export function panelHistogram(el: HTMLElement): Record<string, number> {
  const out: Record<string, number> = {};
  el.querySelectorAll<HTMLElement>(".sl-hist-row").forEach((row) => {
    const cls = row.dataset.class;
    const count = row.querySelector(".sl-hist-count")?.textContent;
    if (cls !== undefined && count) out[cls] = Number(count);
  });
  return out;
}
