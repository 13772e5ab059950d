"""Run the whole pipeline offline from the recorded article fixtures.

Seeds a cache from the replay fixtures under tests/fixtures, trains tiny
baseline models on synthetic corpora, executes a run, and prints the
three result tables. Everything happens in a temp directory; no network.

    python demos/02_offline_pipeline.py
"""

import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from synthetic import make_ebm_nlp, make_evidence_inference  # noqa: E402

from ccs import (  # noqa: E402
    BaselinePioTagger,
    BaselineRelevanceScorer,
    Pipeline,
    RunOptions,
    Settings,
    TrainConfig,
    load_ebm_nlp,
    load_evidence_inference,
    train_baseline,
    train_tagger,
)
from ccs.cache import ArticleCache  # noqa: E402
from ccs.pubmed import PubMedClient  # noqa: E402
from ccs.query import build_query  # noqa: E402

work = Path(tempfile.mkdtemp(prefix="ccs-demo-"))
settings = Settings(data_dir=work / "data", cache_dir=work / "cache")
pipeline = Pipeline(settings)

# --- seed the cache exactly as an online run would have left it ---
spec = build_query("colorectal", cancer=True, use_default_terms=True, name="colorectal-bb")
pipeline.store.save_query(spec)

cache = ArticleCache(settings.cache_dir)
fixture_xml = (REPO / "tests" / "fixtures" / "efetch_colorectal.xml").read_bytes()
per_article = PubMedClient._split_article_set(fixture_xml)
for pmid, xml in per_article.items():
    cache.put_article_xml(pmid, xml)
cache.put_search(
    spec.rendered, 100,
    {"query_name": spec.name, "rendered_query": spec.rendered, "cap": 100,
     "pmids": list(per_article), "total_count": len(per_article),
     "retrieved_at": "demo"},
)
print(f"cached {len(per_article)} articles")

# --- train tiny baselines so scores carry signal ---
ei = load_evidence_inference(make_evidence_inference(work / "ei", n_articles=40, seed=7))
pairs = [(s, int(l)) for a in ei.train.articles for s, l in zip(a.sentences, a.labels)]
relevance = train_baseline(pairs, TrainConfig(epochs=5))
BaselineRelevanceScorer(relevance.params).save(pipeline.store.model_path("relevance-baseline"))

ebm = load_ebm_nlp(make_ebm_nlp(work / "ebm", n_crowd=24, n_expert=3, seed=11))
tagger_cfg = TrainConfig(learning_rate=5e-3, batch_size=256, epochs=12, seed=42,
                         optimizer="adamw", weight_decay=0.01)
tagger = train_tagger([(a.tokens, a.labels) for a in ebm.crowd_train.abstracts], tagger_cfg)
BaselinePioTagger(tagger.params).save(pipeline.store.model_path("pio-baseline"))
print("baseline models trained")

# --- the run ---
record, bundle = pipeline.run("colorectal-bb", RunOptions(k=4, offline=True))
print(f"\nrun {record.run_id}: {record.pmid_count} PMIDs, "
      f"wall {record.wall_time_seconds:.2f}s")
print("stages:", {k: round(v, 3) for k, v in record.stage_seconds.items()})

print("\n=== summaries (PMID / title / journal / summary score) ===")
for row in bundle["summaries"]:
    print(f"  {row['pmid']}  {row['summary_score']:.3f}  {row['title'][:58]}")

best = bundle["summaries"][0]
print(f"\n=== extractive summary for {best['pmid']} (k=4) ===")
print(" ", best["summary_text"][:400])

print("\n=== top entities ===")
for row in bundle["entities"][:10]:
    print(f"  {row['label']:<13} {row['best_score']:.3f}  x{row['count']:<3} {row['text']}")

print("\nre-running is idempotent:",
      pipeline.run("colorectal-bb", RunOptions(k=4, offline=True))[0].run_id == record.run_id)
