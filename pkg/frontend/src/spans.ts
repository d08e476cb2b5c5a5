import type { SentenceView, SpanView } from "./types";

export const CODE_PLACEHOLDER = "<code>";

export interface SpanError {
  ok: false;
  message: string;
}

export interface SpanOk {
  ok: true;
  span: SpanView;
}

export type SpanCheck = SpanOk | SpanError;

/** Order the selection endpoints and trim surrounding whitespace. */
export function normalizeSelection(
  text: string,
  anchor: number,
  focus: number,
): { start: number; end: number } | null {
  let start = Math.min(anchor, focus);
  let end = Math.max(anchor, focus);
  start = Math.max(0, start);
  end = Math.min(text.length, end);
  while (start < end && /\s/.test(text[start])) start += 1;
  while (end > start && /\s/.test(text[end - 1])) end -= 1;
  return start < end ? { start, end } : null;
}

function overlappingSentences(
  sentences: SentenceView[],
  start: number,
  end: number,
): number[] {
  return sentences
    .filter((s) => start < s.char_span[1] && end > s.char_span[0])
    .map((s) => s.index);
}

/**
 * Client-side mirror of the server's span validation: bounds, non-empty
 * slice, sentence overlap, and no crossing of code placeholders.
 */
export function checkSpan(
  text: string,
  sentences: SentenceView[],
  start: number,
  end: number,
): SpanCheck {
  if (!(start >= 0 && start < end && end <= text.length)) {
    return { ok: false, message: `span [${start}, ${end}) is out of bounds` };
  }
  const slice = text.slice(start, end);
  if (!slice.trim()) {
    return { ok: false, message: "selection contains no text" };
  }
  for (
    let at = text.indexOf(CODE_PLACEHOLDER);
    at !== -1;
    at = text.indexOf(CODE_PLACEHOLDER, at + 1)
  ) {
    const codeEnd = at + CODE_PLACEHOLDER.length;
    const overlaps = start < codeEnd && end > at;
    const contains = start <= at && end >= codeEnd;
    if (overlaps && !contains) {
      return {
        ok: false,
        message: "selection crosses a code placeholder",
      };
    }
  }
  const hit = overlappingSentences(sentences, start, end);
  if (hit.length === 0) {
    return { ok: false, message: "selection overlaps no sentence" };
  }
  return {
    ok: true,
    span: {
      sentence_index: hit[0],
      char_start: start,
      char_end: end,
      text: slice,
    },
  };
}

/** Free-text fallback: locate the typed unknown as an exact substring. */
export function spanFromText(
  text: string,
  sentences: SentenceView[],
  query: string,
  from = 0,
): SpanCheck {
  const needle = query.trim();
  if (!needle) return { ok: false, message: "empty unknown text" };
  const at = text.indexOf(needle, from);
  if (at === -1) {
    return { ok: false, message: "text not found in the problem" };
  }
  return checkSpan(text, sentences, at, at + needle.length);
}

/** A sentence is positive iff some span overlaps it (the server rule). */
export function deriveLabels(
  sentences: SentenceView[],
  spans: SpanView[],
): number[] {
  return sentences.map((s) =>
    spans.some(
      (sp) => sp.char_start < s.char_span[1] && sp.char_end > s.char_span[0],
    )
      ? 1
      : 0,
  );
}
