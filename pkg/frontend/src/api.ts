import type {
  AnnotationIn,
  ProblemDetail,
  ProblemListPage,
  Progress,
  SaveResult,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceUnreachableError extends Error {
  constructor(cause: unknown) {
    super(`annotation service unreachable: ${String(cause)}`);
    this.name = "ServiceUnreachableError";
  }
}

/** Thin typed client for the annotation service; all I/O goes through here. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (i, o) => fetch(i, o)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    try {
      return await this.fetchImpl(`${this.base}${path}`, init);
    } catch (err) {
      throw new ServiceUnreachableError(err);
    }
  }

  async listProblems(
    status?: "unlabeled" | "labeled" | "unclear",
    offset = 0,
    limit = 50,
  ): Promise<ProblemListPage> {
    const params = new URLSearchParams({
      offset: String(offset),
      limit: String(limit),
    });
    if (status) params.set("status", status);
    const res = await this.request(`/api/problems?${params}`);
    if (!res.ok) throw new Error(`list failed: ${res.status}`);
    return (await res.json()) as ProblemListPage;
  }

  async getProblem(id: string): Promise<ProblemDetail> {
    const res = await this.request(`/api/problems/${encodeURIComponent(id)}`);
    if (!res.ok) throw new Error(`problem ${id}: ${res.status}`);
    return (await res.json()) as ProblemDetail;
  }

  async saveAnnotation(id: string, body: AnnotationIn): Promise<SaveResult> {
    const res = await this.request(
      `/api/problems/${encodeURIComponent(id)}/annotation`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (res.ok) {
      const data = (await res.json()) as {
        revision: number;
        sentence_labels: number[];
      };
      return { kind: "ok", ...data };
    }
    const detail = await res
      .json()
      .then((d: { detail?: string }) => d.detail ?? `HTTP ${res.status}`)
      .catch(() => `HTTP ${res.status}`);
    if (res.status === 409) return { kind: "conflict", detail };
    return { kind: "invalid", detail };
  }

  async exportAnnotations(): Promise<string> {
    const res = await this.request("/api/export");
    if (!res.ok) throw new Error(`export failed: ${res.status}`);
    return res.text();
  }

  async progress(): Promise<Progress> {
    const res = await this.request("/api/progress");
    if (!res.ok) throw new Error(`progress failed: ${res.status}`);
    return (await res.json()) as Progress;
  }
}
