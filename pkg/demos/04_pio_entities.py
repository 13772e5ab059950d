"""Token tagging, span decoding, and the ranked entity table.

The tagger emits a 4-way distribution per token (Patient, Intervention,
Outcome, None); maximal same-label runs become scored entity spans.

    python demos/04_pio_entities.py
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from synthetic import make_ebm_nlp  # noqa: E402

from ccs import (  # noqa: E402
    BaselinePioTagger,
    aggregate_entities,
    decode_spans,
    load_ebm_nlp,
    segment,
    train_tagger,
)
from ccs.evalrun import EvalConfig, run_eval  # noqa: E402
from ccs.relevance import TrainConfig  # noqa: E402

work = Path(tempfile.mkdtemp(prefix="ccs-demo-"))
corpus = load_ebm_nlp(make_ebm_nlp(work, n_crowd=24, n_expert=4, seed=11))
print(f"crowd train abstracts: {len(corpus.crowd_train.abstracts)}, "
      f"expert test: {len(corpus.expert_test.abstracts)}")

# a few more epochs than the stock defaults; the corpus here is tiny
config = TrainConfig(learning_rate=5e-3, batch_size=256, epochs=12, seed=42,
                     optimizer="adamw", weight_decay=0.01)
result = train_tagger(
    [(a.tokens, a.labels) for a in corpus.crowd_train.abstracts], config
)
tagger = BaselinePioTagger(result.params)
print("per-epoch loss:", " ".join(f"{l:.3f}" for l in result.epoch_losses))

report, _ = run_eval("pio", tagger, corpus.expert_test, EvalConfig())
print("\nexpert-test metrics:")
print(f"  mean of entity F1s : {report.metrics['entity_f1_mean']:.3f}")
print(f"  pooled micro-F1    : {report.metrics['micro_f1_pooled']:.3f}")
for entity, row in report.per_entity.items():
    print(f"  {entity:<13} P={row['precision']:.3f} R={row['recall']:.3f} F1={row['f1']:.3f}")

abstract = ("Adults with colorectal cancer were randomized to beta-blockers "
            "or placebo. The primary outcome was overall survival at 12 months. "
            "A total of 240 participants with colorectal cancer were enrolled.")
sentences = segment(abstract, pmid="demo")
predictions = tagger.tag_article(sentences)
spans = decode_spans(predictions, sentences, pmid="demo")

print("\nspans found in a fresh abstract:")
for span in spans:
    print(f"  {span.label.display():<13} {span.score:.3f}  {span.surface_text!r}")

print("\nranked entity table:")
for row in aggregate_entities(spans):
    print(f"  {row.label.display():<13} {row.best_score:.3f}  x{row.occurrence_count} "
          f"{row.normalized_text}")
