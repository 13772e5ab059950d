"""End-to-end orchestration: query -> PMIDs -> articles -> relevance ->
summaries -> PIO entities, persisted as a content-addressed run.

A run is reproducible: the bundle (the three result surfaces) contains
no timestamps, and its id is a digest of the rendered query, options,
and fetched article content, so re-running identical inputs rewrites
identical bytes. Wall-clock and per-stage timings live in the run
record instead.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .cache import ArticleCache
from .errors import EnvironmentFailure, NetworkError, ScorerUnavailable
from .pio import (
    BaselinePioTagger,
    BridgePioTagger,
    HeadParameters4,
    aggregate_entities,
    decode_spans,
)
from .pubmed import NcbiCredentials, PubMedClient, RawArticle, offline_transport, requests_transport
from .relevance import (
    BaselineRelevanceScorer,
    BridgeRelevanceScorer,
    HeadParameters,
    score_article,
)
from .settings import Settings
from .store import ContentStore
from .summarize import batch_summaries, summarize
from .textproc import segment
from .wire import BridgeClient

STATUS_FETCHED = "fetched"
STATUS_NO_ABSTRACT = "skipped-no-abstract"
STATUS_FAILED = "failed"

FETCH_CHUNK = 200


@dataclass
class RunOptions:
    k: int = 4
    threshold: float = 0.5
    scorer: str = "baseline"
    cap: int = 100
    offline: bool = False
    sort: str = "score"
    workers: int = 4

    def content_key(self) -> dict:
        # offline/workers do not affect results, so they stay out of the id
        return {
            "k": self.k,
            "threshold": self.threshold,
            "scorer": self.scorer,
            "cap": self.cap,
            "sort": self.sort,
        }


@dataclass
class RunRecord:
    run_id: str
    query_name: str
    pmid_count: int
    statuses: dict
    started_at: str
    wall_time_seconds: float
    stage_seconds: dict
    scorer_identifiers: dict

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "query_name": self.query_name,
            "pmid_count": self.pmid_count,
            "statuses": self.statuses,
            "started_at": self.started_at,
            "wall_time_seconds": self.wall_time_seconds,
            "stage_seconds": self.stage_seconds,
            "scorer_identifiers": self.scorer_identifiers,
        }


@dataclass
class Pipeline:
    settings: Settings
    transport: object = None
    _store: ContentStore = field(init=False)
    _cache: ArticleCache = field(init=False)

    def __post_init__(self):
        self._store = ContentStore(self.settings.data_dir)
        self._cache = ArticleCache(self.settings.cache_dir)

    @property
    def store(self) -> ContentStore:
        return self._store

    @property
    def cache(self) -> ArticleCache:
        return self._cache

    # --- wiring ---

    def client(self, offline: bool) -> PubMedClient:
        if offline:
            credentials = NcbiCredentials(self.settings.ncbi_email or "offline@invalid")
            transport = offline_transport
        else:
            if not self.settings.ncbi_email:
                raise EnvironmentFailure("NCBI_EMAIL is not configured; required for live PubMed access")
            credentials = NcbiCredentials(self.settings.ncbi_email, self.settings.ncbi_api_key)
            transport = self.transport or requests_transport
        return PubMedClient(credentials, cache=self._cache, transport=transport)

    def relevance_scorer(self, kind: str):
        if kind == "bridge":
            if not self.settings.bridge_url:
                raise ScorerUnavailable("CCS_BRIDGE_URL is not configured")
            return BridgeRelevanceScorer(BridgeClient(self.settings.bridge_url))
        path = self._store.model_path("relevance-baseline")
        if path.is_file():
            return BaselineRelevanceScorer.load(path)
        return BaselineRelevanceScorer(HeadParameters.zeros())

    def pio_tagger(self, kind: str):
        if kind == "bridge":
            if not self.settings.bridge_url:
                raise ScorerUnavailable("CCS_BRIDGE_URL is not configured")
            return BridgePioTagger(BridgeClient(self.settings.bridge_url))
        path = self._store.model_path("pio-baseline")
        if path.is_file():
            return BaselinePioTagger.load(path)
        return BaselinePioTagger(HeadParameters4.zeros())

    # --- the run ---

    def run(self, query_name: str, options: RunOptions | None = None):
        options = options or RunOptions()
        started_at = datetime.now(timezone.utc).isoformat()
        t0 = time.perf_counter()
        stage: dict[str, float] = {}

        spec = self._store.get_query(query_name)
        client = self.client(options.offline)
        scorer = self.relevance_scorer(options.scorer)
        tagger = self.pio_tagger(options.scorer)

        mark = time.perf_counter()
        pmid_list = client.search(spec, cap=options.cap)
        stage["search"] = time.perf_counter() - mark

        mark = time.perf_counter()
        articles, statuses = self._fetch_all(client, pmid_list.pmids, options.offline)
        stage["fetch"] = time.perf_counter() - mark

        processed, stage_score, stage_summarize, stage_pio = self._process_articles(
            articles, scorer, tagger, options, statuses
        )
        stage["score"] = stage_score
        stage["summarize"] = stage_summarize
        stage["pio"] = stage_pio

        scorer_ids = {"relevance": scorer.identifier, "pio": tagger.identifier}
        bundle = self._build_bundle(
            spec, options, pmid_list.pmids, statuses, processed, scorer_ids
        )
        record = RunRecord(
            run_id=bundle["run_id"],
            query_name=query_name,
            pmid_count=len(pmid_list.pmids),
            statuses=statuses,
            started_at=started_at,
            wall_time_seconds=time.perf_counter() - t0,
            stage_seconds=stage,
            scorer_identifiers=scorer_ids,
        )
        self._store.put_run(bundle["run_id"], bundle, record.to_dict())
        return record, bundle

    def _fetch_all(self, client: PubMedClient, pmids: list[str], offline: bool):
        statuses = {pmid: STATUS_FAILED for pmid in pmids}
        articles: list[RawArticle] = []
        if not pmids:
            return articles, statuses
        if offline:
            wanted = [p for p in pmids if self.cache.get_article_xml(p) is not None]
        else:
            wanted = pmids
        for lo in range(0, len(wanted), FETCH_CHUNK):
            chunk = wanted[lo : lo + FETCH_CHUNK]
            try:
                got = client.fetch(chunk)
            except NetworkError:
                continue  # the chunk stays failed; the run carries on
            for article in got:
                statuses[article.pmid] = STATUS_FETCHED
                articles.append(article)
        return articles, statuses

    def _process_articles(self, articles, scorer, tagger, options: RunOptions, statuses):
        """Score, summarize, and tag each fetched article. Returns the
        per-article payloads plus per-stage second counts."""
        timings = {"score": 0.0, "summarize": 0.0, "pio": 0.0}
        lock_free_results = []

        def process(article: RawArticle):
            sentences = segment(article.abstract_text, pmid=article.pmid)
            if not sentences:
                statuses[article.pmid] = STATUS_NO_ABSTRACT
                return None
            t_score = time.perf_counter()
            results = score_article(sentences, scorer, threshold=options.threshold)
            d_score = time.perf_counter() - t_score
            t_sum = time.perf_counter()
            summary = summarize(results, sentences, k=options.k)
            d_sum = time.perf_counter() - t_sum
            t_pio = time.perf_counter()
            predictions = tagger.tag_article(sentences)
            spans = decode_spans(predictions, sentences, pmid=article.pmid)
            d_pio = time.perf_counter() - t_pio
            return article, sentences, results, summary, spans, (d_score, d_sum, d_pio)

        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            for outcome in pool.map(process, articles):
                if outcome is None:
                    continue
                lock_free_results.append(outcome)
                d_score, d_sum, d_pio = outcome[5]
                timings["score"] += d_score
                timings["summarize"] += d_sum
                timings["pio"] += d_pio

        return lock_free_results, timings["score"], timings["summarize"], timings["pio"]

    def _build_bundle(
        self, spec, options: RunOptions, pmids, statuses, processed, scorer_ids
    ) -> dict:
        relevance_rows = []
        summary_inputs = []
        all_spans = []
        for article, sentences, results, summary, spans, _ in processed:
            ranked = sorted(results, key=lambda r: (-r.score, r.sentence_index))
            rank_of = {r.sentence_index: i + 1 for i, r in enumerate(ranked)}
            selected = {idx for idx, _ in summary.selected}
            relevance_rows.append(
                {
                    "pmid": article.pmid,
                    "title": article.title,
                    "journal": article.journal,
                    "sentences": [
                        {
                            "index": r.sentence_index,
                            "rank": rank_of[r.sentence_index],
                            "text": sentences[r.sentence_index].text,
                            "score": r.score,
                            "label": r.label,
                            "selected": r.sentence_index in selected,
                        }
                        for r in results
                    ],
                }
            )
            summary_inputs.append((article.pmid, article.title, article.journal, summary))
            all_spans.extend(spans)

        summary_by_pmid = {pmid: s for pmid, _, _, s in summary_inputs}
        summaries = []
        for row in batch_summaries(summary_inputs, sort=options.sort):
            s = summary_by_pmid[row["pmid"]]
            summaries.append(
                {
                    **row,
                    "summary_text": s.summary_text,
                    "selected": [[idx, score] for idx, score in s.selected],
                    "k": options.k,
                }
            )
        entities = [
            {
                "label": row.label.display(),
                "text": row.normalized_text,
                "best_score": row.best_score,
                "count": row.occurrence_count,
                "example_pmids": list(row.example_pmids),
            }
            for row in aggregate_entities(all_spans, scope="corpus")
        ]

        body_for_id = {
            "query": spec.rendered,
            "options": options.content_key(),
            "pmids": pmids,
            "statuses": statuses,
            "digests": {a.pmid: a.source_xml_digest for a, *_ in processed},
            "scorers": scorer_ids,
        }
        run_id = hashlib.sha256(
            json.dumps(body_for_id, sort_keys=True).encode("utf-8")
        ).hexdigest()[:12]

        return {
            "run_id": run_id,
            "query_name": spec.name,
            "rendered_query": spec.rendered,
            "options": options.content_key(),
            "scorers": scorer_ids,
            "articles": [{"pmid": p, "status": statuses[p]} for p in pmids],
            "relevance": relevance_rows,
            "summaries": summaries,
            "entities": entities,
        }
