/**
 * Replay a recorded UI transcript through the raw API.
 *
 * Creates a fresh session from the transcript's create step and issues
 * the same calls in order.  Because sessions are fully seeded, the
 * replayed session must export a ledger identical to the original —
 * and every replayed preview must return the histogram the UI showed.
 */

import { Client, ExportResult, PreviewResult } from "./api.js";
import { TranscriptStep } from "./state.js";

export interface ReplayResult {
  exported: ExportResult;
  /** Server responses for each replayed selection step, in order. */
  previews: PreviewResult[];
  /** Indices into `previews` whose histogram differs from the recorded one. */
  histogramMismatches: number[];
}

function sameHistogram(a: Record<string, number>, b: Record<string, number>): boolean {
  const keys = new Set([...Object.keys(a), ...Object.keys(b)]);
  for (const k of keys) if (a[k] !== b[k]) return false;
  return true;
}

export async function replayTranscript(
  client: Client,
  transcript: TranscriptStep[],
): Promise<ReplayResult> {
  if (transcript.length === 0 || transcript[0].op !== "create") {
    throw new Error("transcript must start with a create step");
  }
  const { session_id } = await client.createSession(transcript[0].body);
  const previews: PreviewResult[] = [];
  const histogramMismatches: number[] = [];
  for (const step of transcript.slice(1)) {
    switch (step.op) {
      case "create":
        throw new Error("transcript has more than one create step");
      case "selection": {
        const resp = await client.preview(session_id, step.polygon);
        if (!sameHistogram(resp.histogram, step.histogram)) {
          histogramMismatches.push(previews.length);
        }
        previews.push(resp);
        break;
      }
      case "commit":
        await client.commit(session_id, step.polygon, step.proposed_class);
        break;
      case "back":
        await client.back(session_id);
        break;
      case "finish":
        await client.finish(session_id);
        break;
    }
  }
  const exported = await client.exportLabels(session_id);
  return { exported, previews, histogramMismatches };
}
