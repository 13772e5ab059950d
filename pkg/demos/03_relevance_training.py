"""Train and inspect the native relevance scorer.

The head is score = sigmoid(W.h + b) over hashed lexical features,
trained with binary cross-entropy and an adaptive first-order optimizer.

    python demos/03_relevance_training.py
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from synthetic import make_evidence_inference  # noqa: E402

from ccs import (  # noqa: E402
    BaselineRelevanceScorer,
    TrainConfig,
    auc_score,
    binary_metrics,
    load_evidence_inference,
    train_baseline,
)

work = Path(tempfile.mkdtemp(prefix="ccs-demo-"))
corpus = load_evidence_inference(make_evidence_inference(work, n_articles=80, seed=7))
train_pairs = [
    (s, int(l)) for a in corpus.train.articles for s, l in zip(a.sentences, a.labels)
]
print(f"training sentences: {len(train_pairs)} "
      f"({100 * np.mean([l for _, l in train_pairs]):.1f}% relevant)")

result = train_baseline(train_pairs, TrainConfig(epochs=10, batch_size=64, seed=42))
print("per-epoch loss:", " ".join(f"{l:.3f}" for l in result.epoch_losses))

scorer = BaselineRelevanceScorer(result.params)
labels, scores = [], []
for article in corpus.test.articles:
    labels.extend(int(l) for l in article.labels)
    scores.extend(scorer.score(article.sentences))

report = binary_metrics(labels, scores, threshold=0.5)
print("\nheld-out metrics:")
for key in ("accuracy", "precision", "recall", "f1", "auc_roc"):
    print(f"  {key:>9}: {report.metrics[key]:.3f}")

# the same AUC from first principles, pair by pair
pos = [s for l, s in zip(labels, scores) if l]
neg = [s for l, s in zip(labels, scores) if not l]
wins = sum(p > n for p in pos for n in neg) + 0.5 * sum(p == n for p in pos for n in neg)
print("\npairwise AUC check:", round(wins / (len(pos) * len(neg)), 6),
      "== library:", round(auc_score(labels, scores), 6))
