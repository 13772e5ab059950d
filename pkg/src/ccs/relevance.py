"""Sentence relevance scoring.

The head is a linear transform followed by a sigmoid: score = s(W.h + b),
trained with binary cross-entropy. Any encoder can supply h; the native
baseline uses hashed lexical features plus a few hand-built sentence
statistics, so the whole engine trains and scores on a laptop with no
model server. An HTTP bridge scorer speaks the wire protocol instead.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DegenerateData, DimensionMismatch
from .optim import Adam
from .textproc import Sentence, tokenize
from .wire import BridgeClient

EPSILON = 1e-12

HASH_BUCKETS = 1 << 18
_LENGTH_EDGES = (5, 10, 20, 40)  # token-count bucket upper bounds; 5th is open
CUE_WORDS = ("significant", "p", "ci", "hazard", "ratio", "randomized")
N_EXTRA = 1 + (len(_LENGTH_EDGES) + 1) + 1 + len(CUE_WORDS)
FEATURE_DIM = HASH_BUCKETS + N_EXTRA

_NUMERIC_RE = re.compile(r"^[+-]?\d+(?:[.,]\d+)*%?$")


def sigmoid(z):
    """Numerically stable logistic function; saturates cleanly to 0/1 for
    |z| up to several hundred instead of overflowing."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return float(out) if out.ndim == 0 else out


@dataclass
class HeadParameters:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1:
            raise DimensionMismatch("weights must be a vector")
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise ValueError("head parameters must be finite")

    @classmethod
    def zeros(cls, dim: int = FEATURE_DIM) -> "HeadParameters":
        return cls(np.zeros(dim), 0.0)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def digest(self) -> str:
        h = hashlib.sha256(self.weights.tobytes())
        h.update(np.float64(self.bias).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class SparseVector:
    """Sorted-index sparse feature vector."""

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def dot(self, dense: np.ndarray) -> float:
        return float(dense[self.indices] @ self.values)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


@dataclass(frozen=True)
class RelevanceResult:
    sentence_index: int
    score: float
    label: bool
    threshold: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score outside [0,1]: {self.score}")
        if self.label != (self.score >= self.threshold):
            raise ValueError("label inconsistent with threshold")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 10
    seed: int = 42
    optimizer: str = "adam"
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0 or self.epochs <= 0:
            raise ValueError("hyperparameters must be positive")


def score_head(h, params: HeadParameters) -> float:
    """s(W.h + b) for one sentence representation (sparse or dense)."""
    if isinstance(h, SparseVector):
        if h.dim != params.dim:
            raise DimensionMismatch(f"representation dim {h.dim} != head dim {params.dim}")
        z = h.dot(params.weights) + params.bias
    else:
        h = np.asarray(h, dtype=float)
        if h.shape != params.weights.shape:
            raise DimensionMismatch(
                f"representation shape {h.shape} != weights shape {params.weights.shape}"
            )
        z = float(params.weights @ h) + params.bias
    return float(sigmoid(z))


def bce_loss(y: float, y_pred: float) -> float:
    """Binary cross-entropy with predictions clamped to [eps, 1-eps]."""
    p = min(max(float(y_pred), EPSILON), 1.0 - EPSILON)
    y = float(y)
    return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))


def bce_sigmoid_gradients(h: np.ndarray, params: HeadParameters, y: float):
    """Analytic gradient of BCE(s(W.h+b), y): dW = (p - y) h, db = p - y."""
    h = np.asarray(h, dtype=float)
    p = score_head(h, params)
    return (p - y) * h, p - y


# --- baseline featurization ---


def _hash_feature(feat: str) -> tuple[int, float]:
    h = int.from_bytes(hashlib.blake2b(feat.encode("utf-8"), digest_size=8).digest(), "little")
    return h % HASH_BUCKETS, (1.0 if (h >> 62) & 1 else -1.0)


def _length_bucket(n_tokens: int) -> int:
    for i, edge in enumerate(_LENGTH_EDGES):
        if n_tokens <= edge:
            return i
    return len(_LENGTH_EDGES)


def featurize(sentence: Sentence, n_sentences: int) -> SparseVector:
    """Deterministic sentence representation: signed-hashed lowercase
    unigrams and bigrams, position fraction within the article, a length
    bucket, the numeric-token count, and cue-word flags; L2-normalized.
    """
    words = [t.text.lower() for t in tokenize(sentence)]
    acc: dict[int, float] = {}
    for feat in words:
        idx, sign = _hash_feature("u=" + feat)
        acc[idx] = acc.get(idx, 0.0) + sign
    for a, b in zip(words, words[1:]):
        idx, sign = _hash_feature(f"b={a}_{b}")
        acc[idx] = acc.get(idx, 0.0) + sign

    base = HASH_BUCKETS
    acc[base] = sentence.index / max(1, n_sentences)
    acc[base + 1 + _length_bucket(len(words))] = 1.0
    n_numeric = sum(1 for w in words if _NUMERIC_RE.match(w))
    if n_numeric:
        acc[base + 1 + len(_LENGTH_EDGES) + 1] = float(n_numeric)
    cue_base = base + 1 + len(_LENGTH_EDGES) + 2
    for i, cue in enumerate(CUE_WORDS):
        if cue in words:
            acc[cue_base + i] = 1.0

    indices = np.array(sorted(acc), dtype=np.int64)
    values = np.array([acc[i] for i in indices], dtype=float)
    norm = np.linalg.norm(values)
    if norm > 0:
        values = values / norm
    return SparseVector(indices=indices, values=values, dim=FEATURE_DIM)


def _article_lengths(sentences: list[Sentence]) -> dict[str, int]:
    lengths: dict[str, int] = {}
    for s in sentences:
        lengths[s.article_pmid] = max(lengths.get(s.article_pmid, 0), s.index + 1)
    return lengths


def features_matrix(sentences: list[Sentence]) -> sparse.csr_matrix:
    """Stack featurize() over sentences; article length for the position
    feature is inferred per article_pmid from the highest index seen."""
    lengths = _article_lengths(sentences)
    rows = [featurize(s, lengths[s.article_pmid]) for s in sentences]
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, r in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(r.indices)
    indices = np.concatenate([r.indices for r in rows]) if rows else np.zeros(0, dtype=np.int64)
    values = np.concatenate([r.values for r in rows]) if rows else np.zeros(0)
    return sparse.csr_matrix((values, indices, indptr), shape=(len(rows), FEATURE_DIM))


@dataclass
class TrainResult:
    params: HeadParameters
    epoch_losses: list[float] = field(default_factory=list)


def train_baseline(dataset: list[tuple[Sentence, int]], cfg: TrainConfig | None = None) -> TrainResult:
    """Mini-batch BCE training of the linear head over baseline features.

    Shuffles with a seeded RNG each epoch, so identical (data, config)
    yield bitwise-identical parameter trajectories. Requires both classes
    in the data.
    """
    cfg = cfg or TrainConfig()
    if not dataset:
        raise DegenerateData("empty training set")
    labels = np.array([float(y) for _, y in dataset])
    if len(set(labels.tolist())) < 2:
        raise DegenerateData("training data contains a single class")

    X = features_matrix([s for s, _ in dataset])
    n = X.shape[0]
    weights = np.zeros(FEATURE_DIM)
    bias = np.zeros(1)
    opt = Adam([weights, bias], lr=cfg.learning_rate, weight_decay=cfg.weight_decay)
    rng = np.random.default_rng(cfg.seed)

    epoch_losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            Xb = X[idx]
            yb = labels[idx]
            z = Xb @ weights + bias[0]
            p = sigmoid(z)
            pc = np.clip(p, EPSILON, 1.0 - EPSILON)
            total += float(-np.sum(yb * np.log(pc) + (1 - yb) * np.log(1 - pc)))
            g = (p - yb) / len(idx)
            grad_w = Xb.T @ g
            grad_b = np.array([g.sum()])
            opt.step([np.asarray(grad_w).ravel(), grad_b])
        epoch_losses.append(total / n)

    return TrainResult(HeadParameters(weights, float(bias[0])), epoch_losses)


# --- scorer contract ---


class BaselineRelevanceScorer:
    """Immutable scorer around trained head parameters."""

    def __init__(self, params: HeadParameters):
        self.params = params

    @property
    def identifier(self) -> str:
        return f"baseline-relevance:{self.params.digest()}"

    def score(self, sentences: list[Sentence]) -> list[float]:
        n = len(sentences)
        lengths = _article_lengths(sentences)
        return [
            score_head(featurize(s, lengths[s.article_pmid]), self.params)
            for s in sentences
        ]

    def save(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(path, weights=self.params.weights, bias=self.params.bias)

    @classmethod
    def load(cls, path) -> "BaselineRelevanceScorer":
        data = np.load(path)
        return cls(HeadParameters(data["weights"], float(data["bias"])))


class BridgeRelevanceScorer:
    """Scores by POSTing sentence texts to a /score sidecar."""

    def __init__(self, client: BridgeClient):
        self.client = client

    @property
    def identifier(self) -> str:
        return f"bridge-relevance:{self.client.url}"

    def score(self, sentences: list[Sentence]) -> list[float]:
        if not sentences:
            return []
        return self.client.score_relevance([s.text for s in sentences])


def score_article(
    sentences: list[Sentence], scorer, threshold: float = 0.5
) -> list[RelevanceResult]:
    """One RelevanceResult per sentence, document order preserved. Never
    mutates scorer state."""
    scores = scorer.score(sentences)
    if len(scores) != len(sentences):
        raise DimensionMismatch("scorer returned a different number of scores")
    return [
        RelevanceResult(
            sentence_index=s.index,
            score=float(score),
            label=float(score) >= threshold,
            threshold=threshold,
        )
        for s, score in zip(sentences, scores)
    ]
