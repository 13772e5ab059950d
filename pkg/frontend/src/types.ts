/** Shapes served by the pipeline HTTP API. The UI never derives scores
 * itself; every number shown comes from one of these payloads. */

export interface QueryInfo {
  name: string;
  disease: string;
  rendered: string;
  created_at: string;
}

export interface QueryPreview {
  name: string;
  rendered: string;
  saved?: boolean;
}

export interface SearchResult {
  query_name: string;
  pmids: string[];
  total_count: number;
  retrieved_at: string;
}

export interface RunRecord {
  run_id: string;
  query_name: string;
  pmid_count: number;
  statuses: Record<string, string>;
  wall_time_seconds: number;
  stage_seconds: Record<string, number>;
  status?: string;
}

export interface SentenceRow {
  index: number;
  rank: number;
  text: string;
  score: number;
  label: boolean;
  selected: boolean;
}

export interface RelevanceArticle {
  pmid: string;
  title: string;
  journal: string;
  sentences: SentenceRow[];
}

export interface SummaryRow {
  pmid: string;
  title: string;
  journal: string;
  summary_score: number;
  summary_text: string;
  selected: [number, number][];
  k: number;
}

export interface EntityRow {
  label: string;
  text: string;
  best_score: number;
  count: number;
  example_pmids: string[];
}

export interface RunCreateRequest {
  query_name: string;
  k?: number;
  threshold?: number;
  scorer?: string;
  cap?: number;
  offline?: boolean;
  sort?: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
