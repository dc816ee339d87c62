/**
 * Session controller: all client-side state for one labeling session.
 *
 * The controller never decides anything about labels itself — purity,
 * majority and outcomes are whatever the server said last.  It also
 * records a transcript of every API call it makes, so a finished UI
 * session can be replayed through the raw API and must produce the
 * same exported ledger (that equality is what the end-to-end test
 * checks).
 */

import {
  ApiError,
  Client,
  CommitResult,
  ExportResult,
  Polygon,
  PreviewResult,
  SessionConfig,
  ViewPayload,
} from "./api.js";

export type TranscriptStep =
  | { op: "create"; body: SessionConfig }
  | { op: "selection"; polygon: Polygon; histogram: Record<string, number> }
  | { op: "commit"; polygon: Polygon; proposed_class: number | null }
  | { op: "back" }
  | { op: "finish" };

export interface OutcomeNote {
  outcome: string;
  assigned_class: number | null;
  member_count: number;
  reason: string;
}

export interface Crumb {
  viewId: number;
  n: number;
}

export interface ControllerState {
  sessionId: string | null;
  view: ViewPayload | null;
  /** View-stack ancestry, root first; always view.depth long. */
  crumbs: Crumb[];
  /** Closed, uncommitted selection in view coordinates. */
  polygon: Polygon | null;
  /** Server evidence for `polygon`; null while no closed polygon. */
  preview: PreviewResult | null;
  previewPending: boolean;
  /** True while a mutating request is in flight; commit/back/finish stay disabled. */
  busy: boolean;
  notice: string | null;
  lastOutcome: OutcomeNote | null;
  finished: boolean;
  exported: ExportResult | null;
}

export class SessionController {
  readonly client: Client;
  readonly transcript: TranscriptStep[] = [];
  state: ControllerState = {
    sessionId: null,
    view: null,
    crumbs: [],
    polygon: null,
    preview: null,
    previewPending: false,
    busy: false,
    notice: null,
    lastOutcome: null,
    finished: false,
    exported: null,
  };
  onChange: (() => void) | null = null;
  private previewSeq = 0;

  constructor(client: Client) {
    this.client = client;
  }

  private emit(): void {
    if (this.onChange) this.onChange();
  }

  private fail(err: unknown): void {
    // surface every server/network error inline, never drop it
    this.state.notice = err instanceof ApiError ? err.message : String(err);
    this.emit();
  }

  /** Keep the breadcrumb stack exactly view.depth entries long. */
  private syncCrumbs(): void {
    const s = this.state;
    if (!s.view) {
      s.crumbs = [];
      return;
    }
    while (s.crumbs.length > s.view.depth) s.crumbs.pop();
    while (s.crumbs.length < s.view.depth) s.crumbs.push({ viewId: -1, n: -1 });
    s.crumbs[s.view.depth - 1] = { viewId: s.view.view_id, n: s.view.n };
  }

  canConfirm(): boolean {
    const s = this.state;
    return !!(
      s.polygon &&
      s.preview &&
      s.preview.member_count > 0 &&
      !s.previewPending &&
      !s.busy &&
      !s.finished
    );
  }

  async createSession(cfg: SessionConfig): Promise<void> {
    const s = this.state;
    if (s.busy) return;
    s.busy = true;
    s.notice = null;
    this.emit();
    try {
      const resp = await this.client.createSession(cfg);
      s.sessionId = resp.session_id;
      s.view = resp.view;
      s.crumbs = [];
      this.syncCrumbs();
      s.polygon = null;
      s.preview = null;
      s.lastOutcome = null;
      s.finished = false;
      s.exported = null;
      this.transcript.length = 0;
      this.transcript.push({ op: "create", body: cfg });
    } catch (err) {
      this.fail(err);
    } finally {
      s.busy = false;
      this.emit();
    }
  }

  /** A closed polygon was drawn: fetch its seed evidence from the server. */
  async setSelection(polygon: Polygon): Promise<void> {
    const s = this.state;
    if (!s.sessionId || s.finished) return;
    const seq = ++this.previewSeq;
    s.polygon = polygon;
    s.preview = null;
    s.previewPending = true;
    s.notice = null;
    this.emit();
    try {
      const preview = await this.client.preview(s.sessionId, polygon);
      if (seq !== this.previewSeq) return; // a newer selection superseded this one
      s.preview = preview;
      s.previewPending = false;
      this.transcript.push({ op: "selection", polygon, histogram: preview.histogram });
      if (preview.member_count === 0) {
        s.notice = preview.empty_reason
          ? `empty selection: ${preview.empty_reason}`
          : "empty selection";
      }
    } catch (err) {
      if (seq !== this.previewSeq) return;
      s.previewPending = false;
      s.polygon = null;
      this.fail(err);
    }
    this.emit();
  }

  clearSelection(): void {
    this.previewSeq++;
    this.state.polygon = null;
    this.state.preview = null;
    this.state.previewPending = false;
    this.emit();
  }

  async confirm(proposedClass: number | null): Promise<void> {
    const s = this.state;
    if (!this.canConfirm() || !s.sessionId || !s.polygon) return;
    const polygon = s.polygon;
    s.busy = true;
    s.notice = null;
    this.emit();
    let resp: CommitResult;
    try {
      resp = await this.client.commit(s.sessionId, polygon, proposedClass);
    } catch (err) {
      s.busy = false;
      this.fail(err);
      return;
    }
    this.transcript.push({ op: "commit", polygon, proposed_class: proposedClass });
    s.view = resp.view;
    this.syncCrumbs();
    s.polygon = null;
    s.preview = null;
    s.lastOutcome = {
      outcome: resp.outcome,
      assigned_class: resp.assigned_class,
      member_count: resp.member_count,
      reason: resp.reason,
    };
    s.busy = false;
    this.emit();
  }

  async goBack(): Promise<void> {
    const s = this.state;
    if (s.busy || !s.sessionId || s.finished) return;
    s.busy = true;
    s.notice = null;
    this.emit();
    try {
      const resp = await this.client.back(s.sessionId);
      this.transcript.push({ op: "back" });
      s.view = resp.view;
      this.syncCrumbs();
      s.polygon = null;
      s.preview = null;
    } catch (err) {
      this.fail(err);
    } finally {
      s.busy = false;
      this.emit();
    }
  }

  /** Finish the session and pull the exported ledger in one motion. */
  async finish(): Promise<void> {
    const s = this.state;
    if (s.busy || !s.sessionId || s.finished) return;
    s.busy = true;
    s.notice = null;
    this.emit();
    try {
      await this.client.finish(s.sessionId);
      this.transcript.push({ op: "finish" });
      s.finished = true;
      s.polygon = null;
      s.preview = null;
      s.exported = await this.client.exportLabels(s.sessionId);
    } catch (err) {
      this.fail(err);
    } finally {
      s.busy = false;
      this.emit();
    }
  }
}
