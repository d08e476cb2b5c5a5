// Payload shapes of the annotation service HTTP API.

export interface ProblemSummary {
  id: string;
  status: "unlabeled" | "labeled" | "unclear";
  n_sentences: number;
}

export interface ProblemListPage {
  total: number;
  offset: number;
  items: ProblemSummary[];
}

export interface SentenceView {
  index: number;
  text: string;
  char_span: [number, number];
}

export interface SpanView {
  sentence_index: number;
  char_start: number;
  char_end: number;
  text: string;
}

export interface AnnotationView {
  problem_id: string;
  spans: SpanView[];
  sentence_labels: number[];
  unclear: boolean;
  revision: number;
}

export interface ProblemDetail {
  id: string;
  text: string;
  sentences: SentenceView[];
  annotation: AnnotationView | null;
  revision: number;
}

export interface SpanIn {
  sentence_index: number | null;
  char_start: number;
  char_end: number;
}

export interface AnnotationIn {
  spans: SpanIn[];
  unclear: boolean;
  revision: number;
}

export interface SaveOk {
  kind: "ok";
  revision: number;
  sentence_labels: number[];
}

export interface SaveConflict {
  kind: "conflict";
  detail: string;
}

export interface SaveInvalid {
  kind: "invalid";
  detail: string;
}

export type SaveResult = SaveOk | SaveConflict | SaveInvalid;

export interface Progress {
  unlabeled: number;
  labeled: number;
  unclear: number;
  total: number;
}
