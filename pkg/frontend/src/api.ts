import type {
  ApiErrorBody,
  EntityRow,
  QueryInfo,
  QueryPreview,
  RelevanceArticle,
  RunCreateRequest,
  RunRecord,
  SearchResult,
  SummaryRow,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin REST client; the server is the single source of truth. */
export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: Partial<ApiErrorBody> = {};
      try {
        body = await resp.json();
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(resp.status, body.code ?? "error", body.message ?? resp.statusText);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listQueries(): Promise<QueryInfo[]> {
    return this.request<QueryInfo[]>("/queries");
  }

  createQuery(body: Record<string, unknown>): Promise<QueryPreview> {
    return this.post<QueryPreview>("/queries", body);
  }

  previewQuery(body: Record<string, unknown>): Promise<QueryPreview> {
    return this.post<QueryPreview>("/queries", { ...body, dry_run: true });
  }

  search(name: string, cap = 100, offline = false): Promise<SearchResult> {
    return this.post<SearchResult>(`/queries/${encodeURIComponent(name)}/search`, {
      cap,
      offline,
    });
  }

  createRun(body: RunCreateRequest): Promise<{ run_id: string; record: RunRecord }> {
    return this.post("/runs", body);
  }

  getRun(runId: string): Promise<RunRecord> {
    return this.request<RunRecord>(`/runs/${encodeURIComponent(runId)}`);
  }

  getRelevance(runId: string): Promise<RelevanceArticle[]> {
    return this.request<RelevanceArticle[]>(`/runs/${encodeURIComponent(runId)}/relevance`);
  }

  getSummaries(runId: string, sort: "score" | "pmid" = "score"): Promise<SummaryRow[]> {
    return this.request<SummaryRow[]>(
      `/runs/${encodeURIComponent(runId)}/summaries?sort=${sort}`,
    );
  }

  getEntities(runId: string): Promise<EntityRow[]> {
    return this.request<EntityRow[]>(`/runs/${encodeURIComponent(runId)}/entities`);
  }
}
