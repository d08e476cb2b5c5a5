import type { ApiClient } from "./api";
import type { ProblemDetail, SpanView } from "./types";
import { checkSpan, deriveLabels, normalizeSelection, spanFromText } from "./spans";

export type EditorEvent =
  | { kind: "changed" }
  | { kind: "saved"; revision: number }
  | { kind: "conflict"; detail: string }
  | { kind: "rejected"; message: string };

/**
 * State machine behind the annotate view. One in-flight mutation at a time;
 * a stale save surfaces a conflict and reloads the server state.
 */
export class AnnotationEditor {
  spans: SpanView[] = [];
  unclear = false;
  revision = 0;
  inFlight = false;
  conflict: string | null = null;

  private detail: ProblemDetail;
  private readonly listeners: ((e: EditorEvent) => void)[] = [];

  constructor(
    private readonly client: ApiClient,
    detail: ProblemDetail,
  ) {
    this.detail = detail;
    this.loadFromDetail(detail);
  }

  onEvent(listener: (e: EditorEvent) => void): void {
    this.listeners.push(listener);
  }

  private emit(e: EditorEvent): void {
    for (const l of this.listeners) l(e);
  }

  loadFromDetail(detail: ProblemDetail): void {
    this.detail = detail;
    this.revision = detail.revision;
    this.spans = detail.annotation ? [...detail.annotation.spans] : [];
    this.unclear = detail.annotation?.unclear ?? false;
    this.conflict = null;
    this.emit({ kind: "changed" });
  }

  get problemId(): string {
    return this.detail.id;
  }

  get labels(): number[] {
    return deriveLabels(this.detail.sentences, this.spans);
  }

  /** Add one span from a raw selection; spans are entered one at a time. */
  addSelection(anchor: number, focus: number): boolean {
    if (this.unclear) {
      this.emit({
        kind: "rejected",
        message: "uncheck 'unclear' before marking spans",
      });
      return false;
    }
    const sel = normalizeSelection(this.detail.text, anchor, focus);
    if (!sel) {
      this.emit({ kind: "rejected", message: "selection contains no text" });
      return false;
    }
    const check = checkSpan(this.detail.text, this.detail.sentences, sel.start, sel.end);
    if (!check.ok) {
      this.emit({ kind: "rejected", message: check.message });
      return false;
    }
    this.spans.push(check.span);
    this.emit({ kind: "changed" });
    return true;
  }

  /** Free-text fallback: the typed unknown must match a substring. */
  addText(query: string): boolean {
    if (this.unclear) {
      this.emit({
        kind: "rejected",
        message: "uncheck 'unclear' before marking spans",
      });
      return false;
    }
    const check = spanFromText(this.detail.text, this.detail.sentences, query);
    if (!check.ok) {
      this.emit({ kind: "rejected", message: check.message });
      return false;
    }
    this.spans.push(check.span);
    this.emit({ kind: "changed" });
    return true;
  }

  removeSpan(index: number): void {
    this.spans.splice(index, 1);
    this.emit({ kind: "changed" });
  }

  /** Unclear is mutually exclusive with spans; clearing them needs consent. */
  setUnclear(value: boolean, confirmClear: () => boolean): boolean {
    if (value && this.spans.length > 0) {
      if (!confirmClear()) return false;
      this.spans = [];
    }
    this.unclear = value;
    this.emit({ kind: "changed" });
    return true;
  }

  /** PUT with the held revision; 409 reloads server state for a merge. */
  async save(): Promise<boolean> {
    if (this.inFlight) return false;
    this.inFlight = true;
    try {
      const result = await this.client.saveAnnotation(this.problemId, {
        spans: this.spans.map((s) => ({
          sentence_index: s.sentence_index,
          char_start: s.char_start,
          char_end: s.char_end,
        })),
        unclear: this.unclear,
        revision: this.revision,
      });
      if (result.kind === "ok") {
        this.revision = result.revision;
        this.conflict = null;
        this.emit({ kind: "saved", revision: result.revision });
        return true;
      }
      if (result.kind === "conflict") {
        this.conflict = result.detail;
        const fresh = await this.client.getProblem(this.problemId);
        this.detail = fresh;
        this.revision = fresh.revision;
        this.emit({ kind: "conflict", detail: result.detail });
        return false;
      }
      this.emit({ kind: "rejected", message: result.detail });
      return false;
    } finally {
      this.inFlight = false;
    }
  }
}
