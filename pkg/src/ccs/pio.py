"""Token-level Patient / Intervention / Outcome tagging.

A 4-way linear softmax head over windowed token features (trainable
native baseline) or a bridge sidecar produces one distribution per
token. Maximal same-label runs become entity spans, which aggregate
into the ranked entity table.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DegenerateData, DimensionMismatch
from .optim import Adam
from .relevance import EPSILON, HASH_BUCKETS, SparseVector, TrainConfig, _hash_feature
from .textproc import Sentence, Token, byte_slice, tokenize
from .wire import BridgeClient


class PioLabel(IntEnum):
    PATIENT = 0
    INTERVENTION = 1
    OUTCOME = 2
    NONE = 3

    def display(self) -> str:
        return {0: "Patient", 1: "Intervention", 2: "Outcome", 3: "None"}[int(self)]

    @staticmethod
    def from_name(name: str) -> "PioLabel":
        key = name.strip().lower()
        for label in PioLabel:
            if label.display().lower() == key:
                return label
        raise ValueError(f"unknown PIO label: {name!r}")


ENTITY_LABELS = (PioLabel.PATIENT, PioLabel.INTERVENTION, PioLabel.OUTCOME)

TAGGER_DEFAULTS = TrainConfig(
    learning_rate=5e-3, batch_size=256, epochs=5, seed=42,
    optimizer="adamw", weight_decay=0.01,
)


@dataclass
class HeadParameters4:
    weights: np.ndarray  # (4, D)
    bias: np.ndarray  # (4,)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.bias = np.asarray(self.bias, dtype=float)
        if self.weights.ndim != 2 or self.weights.shape[0] != 4 or self.bias.shape != (4,):
            raise DimensionMismatch("expected weights (4, D) and bias (4,)")

    @classmethod
    def zeros(cls, dim: int = HASH_BUCKETS) -> "HeadParameters4":
        return cls(np.zeros((4, dim)), np.zeros(4))

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def digest(self) -> str:
        h = hashlib.sha256(self.weights.tobytes())
        h.update(self.bias.tobytes())
        return h.hexdigest()[:16]


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-subtracted softmax along the last axis."""
    logits = np.asarray(logits, dtype=float)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_head(h, params: HeadParameters4) -> np.ndarray:
    """Distribution over the 4 labels for one token representation."""
    if isinstance(h, SparseVector):
        if h.dim != params.dim:
            raise DimensionMismatch(f"representation dim {h.dim} != head dim {params.dim}")
        logits = params.weights[:, h.indices] @ h.values + params.bias
    else:
        h = np.asarray(h, dtype=float)
        if h.shape != (params.dim,):
            raise DimensionMismatch(f"representation shape {h.shape}, head dim {params.dim}")
        logits = params.weights @ h + params.bias
    return softmax(logits)


def cross_entropy(y: np.ndarray, y_pred: np.ndarray) -> float:
    """-sum_j y[j] log(p[j]) with predictions clamped at eps; y one-hot."""
    p = np.clip(np.asarray(y_pred, dtype=float), EPSILON, None)
    return float(-np.sum(np.asarray(y, dtype=float) * np.log(p)))


def softmax_ce_gradients(h: np.ndarray, params: HeadParameters4, label: int):
    """Analytic gradient of CE(softmax(Wh+b), onehot(label)):
    dW = (p - y) outer h, db = p - y."""
    p = softmax_head(np.asarray(h, dtype=float), params)
    delta = p.copy()
    delta[label] -= 1.0
    return np.outer(delta, h), delta


def argmax_label(distribution: np.ndarray) -> PioLabel:
    """Highest-probability label; exact ties resolve to None rather than
    inventing an entity."""
    dist = np.asarray(distribution, dtype=float)
    best = dist.max()
    if dist[PioLabel.NONE] == best:
        return PioLabel.NONE
    return PioLabel(int(np.argmax(dist)))


# --- baseline token features ---

_PAD_LEFT = "<s>"
_PAD_RIGHT = "</s>"
_WINDOW = 2


def _shape_class(text: str) -> str:
    has_alpha = any(c.isalpha() for c in text)
    has_digit = any(c.isdigit() for c in text)
    if has_alpha and has_digit:
        return "mixed"
    if has_alpha:
        return "alpha"
    if has_digit:
        return "digit"
    if all(not c.isalnum() for c in text):
        return "punct"
    return "other"


def featurize_token(tokens: list[str], index: int):
    """Signed-hashed features of the token and its +/-2 neighbors
    (identity, shape class, 3-char suffix, capitalization, numeric flag)
    plus a position-in-sentence bucket. Boundary positions see padding
    sentinels."""
    n = len(tokens)
    acc: dict[int, float] = {}

    def add(feat: str):
        idx, sign = _hash_feature(feat)
        acc[idx] = acc.get(idx, 0.0) + sign

    for off in range(-_WINDOW, _WINDOW + 1):
        j = index + off
        if j < 0:
            tok = _PAD_LEFT
        elif j >= n:
            tok = _PAD_RIGHT
        else:
            tok = tokens[j]
        lower = tok.lower()
        add(f"{off}:id={lower}")
        add(f"{off}:shape={_shape_class(tok)}")
        add(f"{off}:suf3={lower[-3:]}")
        add(f"{off}:cap={tok[:1].isupper()}")
        add(f"{off}:num={any(c.isdigit() for c in tok)}")
    add(f"posb={min(9, 10 * index // max(1, n))}")

    indices = np.array(sorted(acc), dtype=np.int64)
    values = np.array([acc[i] for i in indices], dtype=float)
    return SparseVector(indices=indices, values=values, dim=HASH_BUCKETS)


def _token_matrix(sentences_tokens: list[list[str]]) -> sparse.csr_matrix:
    rows = [
        featurize_token(toks, i)
        for toks in sentences_tokens
        for i in range(len(toks))
    ]
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, r in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(r.indices)
    indices = np.concatenate([r.indices for r in rows]) if rows else np.zeros(0, dtype=np.int64)
    values = np.concatenate([r.values for r in rows]) if rows else np.zeros(0)
    return sparse.csr_matrix((values, indices, indptr), shape=(len(rows), HASH_BUCKETS))


@dataclass
class TaggerTrainResult:
    params: HeadParameters4
    epoch_losses: list[float] = field(default_factory=list)


def train_tagger(
    sentences: list[tuple[list[str], list[PioLabel]]],
    cfg: TrainConfig | None = None,
) -> TaggerTrainResult:
    """Mini-batch cross-entropy training of the 4-way head with decoupled
    weight decay. Every label must occur at least once."""
    cfg = cfg or TAGGER_DEFAULTS
    flat_labels = [int(l) for _, labels in sentences for l in labels]
    if not flat_labels:
        raise DegenerateData("no tokens to train on")
    if set(flat_labels) != {0, 1, 2, 3}:
        raise DegenerateData("training data must contain every label at least once")

    X = _token_matrix([toks for toks, _ in sentences])
    y = np.array(flat_labels, dtype=np.int64)
    n = X.shape[0]
    onehot = np.zeros((n, 4))
    onehot[np.arange(n), y] = 1.0

    weights = np.zeros((4, HASH_BUCKETS))
    bias = np.zeros(4)
    decay = cfg.weight_decay if cfg.optimizer == "adamw" else 0.0
    opt = Adam([weights, bias], lr=cfg.learning_rate, weight_decay=decay)
    rng = np.random.default_rng(cfg.seed)

    epoch_losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            Xb = X[idx]
            logits = Xb @ weights.T + bias
            probs = softmax(logits)
            pc = np.clip(probs, EPSILON, None)
            total += float(-np.sum(onehot[idx] * np.log(pc)))
            delta = (probs - onehot[idx]) / len(idx)
            grad_w = (Xb.T @ delta).T
            grad_b = delta.sum(axis=0)
            opt.step([np.asarray(grad_w), grad_b])
        epoch_losses.append(total / n)

    return TaggerTrainResult(HeadParameters4(weights, bias), epoch_losses)


# --- predictions, spans, aggregation ---


@dataclass(frozen=True)
class TokenPrediction:
    token: Token
    distribution: np.ndarray
    label: PioLabel

    @staticmethod
    def from_distribution(token: Token, dist) -> "TokenPrediction":
        dist = np.asarray(dist, dtype=float)
        if dist.shape != (4,) or abs(float(dist.sum()) - 1.0) > 1e-9 or (dist < 0).any():
            raise ValueError("distribution must be 4 non-negative reals summing to 1")
        return TokenPrediction(token=token, distribution=dist, label=argmax_label(dist))


@dataclass(frozen=True)
class EntitySpan:
    pmid: str
    label: PioLabel
    sentence_index: int
    token_start: int  # half-open token range within the sentence
    token_end: int
    surface_text: str
    score: float
    score_min: float
    score_max: float


@dataclass(frozen=True)
class EntityTableRow:
    label: PioLabel
    normalized_text: str
    best_score: float
    occurrence_count: int
    example_pmids: tuple[str, ...]


def decode_spans(
    predictions: list[TokenPrediction],
    sentences: list[Sentence] | None = None,
    pmid: str = "",
) -> list[EntitySpan]:
    """Merge maximal runs of consecutive same-label tokens (within one
    sentence) into spans. Span score is the mean probability the run
    assigns to its label; with the source sentences available the surface
    text preserves original spacing, otherwise tokens are joined with
    single spaces."""
    by_sentence = {s.index: s for s in sentences} if sentences else {}
    if not pmid and sentences:
        pmid = sentences[0].article_pmid

    spans: list[EntitySpan] = []
    run: list[TokenPrediction] = []

    def flush():
        if not run:
            return
        label = run[0].label
        probs = [float(p.distribution[label]) for p in run]
        sent = by_sentence.get(run[0].token.sentence_index)
        if sent is not None:
            text = byte_slice(sent.text, run[0].token.char_start, run[-1].token.char_end)
        else:
            text = " ".join(p.token.text for p in run)
        spans.append(
            EntitySpan(
                pmid=pmid,
                label=label,
                sentence_index=run[0].token.sentence_index,
                token_start=run[0].token.index,
                token_end=run[-1].token.index + 1,
                surface_text=text,
                score=sum(probs) / len(probs),
                score_min=min(probs),
                score_max=max(probs),
            )
        )
        run.clear()

    prev_key = None
    for pred in predictions:
        key = (pred.token.sentence_index, pred.label)
        contiguous = (
            run
            and prev_key == key
            and pred.token.index == run[-1].token.index + 1
        )
        if not contiguous:
            flush()
        if pred.label != PioLabel.NONE:
            run.append(pred)
        prev_key = key
    flush()
    return spans


def spans_to_labels(spans: list[EntitySpan], token_counts: dict[int, int]) -> dict[int, list[PioLabel]]:
    """Re-expand spans to per-token label sequences (None elsewhere); the
    exact inverse of decode_spans over argmax labels."""
    out = {si: [PioLabel.NONE] * n for si, n in token_counts.items()}
    for span in spans:
        seq = out[span.sentence_index]
        for i in range(span.token_start, span.token_end):
            seq[i] = span.label
    return out


_STRIP_PUNCT = "()[]{}.,;:!?\"'"


def normalize_entity_text(text: str) -> str:
    return " ".join(text.split()).strip(_STRIP_PUNCT + " ").casefold()


def aggregate_entities(spans: list[EntitySpan], scope: str = "corpus") -> list[EntityTableRow]:
    """Group spans by (label, normalized surface text), additionally by
    PMID when scope="article", and rank by best score, then occurrence
    count, then text."""
    groups: dict[tuple, list[EntitySpan]] = {}
    for span in spans:
        norm = normalize_entity_text(span.surface_text)
        if not norm:
            continue
        key = (span.label, norm) if scope == "corpus" else (span.pmid, span.label, norm)
        groups.setdefault(key, []).append(span)

    rows = []
    for key, members in groups.items():
        label, norm = key[-2], key[-1]
        rows.append(
            EntityTableRow(
                label=label,
                normalized_text=norm,
                best_score=max(m.score for m in members),
                occurrence_count=len(members),
                example_pmids=tuple(sorted({m.pmid for m in members if m.pmid})[:10]),
            )
        )
    rows.sort(key=lambda r: (-r.best_score, -r.occurrence_count, r.normalized_text))
    return rows


# --- tagger contract ---


class BaselinePioTagger:
    def __init__(self, params: HeadParameters4):
        self.params = params

    @property
    def identifier(self) -> str:
        return f"baseline-pio:{self.params.digest()}"

    def tag_token_lists(self, token_lists: list[list[str]]) -> list[list[np.ndarray]]:
        out = []
        for toks in token_lists:
            out.append([softmax_head(featurize_token(toks, i), self.params) for i in range(len(toks))])
        return out

    def tag_article(self, sentences: list[Sentence]) -> list[TokenPrediction]:
        tokens = [tokenize(s) for s in sentences]
        dists = self.tag_token_lists([[t.text for t in toks] for toks in tokens])
        return [
            TokenPrediction.from_distribution(tok, dist)
            for toks, sent_dists in zip(tokens, dists)
            for tok, dist in zip(toks, sent_dists)
        ]

    def save(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(path, weights=self.params.weights, bias=self.params.bias)

    @classmethod
    def load(cls, path) -> "BaselinePioTagger":
        data = np.load(path)
        return cls(HeadParameters4(data["weights"], data["bias"]))


class BridgePioTagger:
    def __init__(self, client: BridgeClient):
        self.client = client

    @property
    def identifier(self) -> str:
        return f"bridge-pio:{self.client.url}"

    def tag_token_lists(self, token_lists: list[list[str]]) -> list[list[np.ndarray]]:
        if not any(token_lists):
            return [[] for _ in token_lists]
        raw = self.client.score_pio(token_lists)
        out = []
        for per_sent in raw:
            dists = []
            for d in per_sent:
                arr = np.asarray(d, dtype=float)
                dists.append(arr / arr.sum())  # wire allows 1e-6 slack; renormalize
            out.append(dists)
        return out

    def tag_article(self, sentences: list[Sentence]) -> list[TokenPrediction]:
        tokens = [tokenize(s) for s in sentences]
        dists = self.tag_token_lists([[t.text for t in toks] for toks in tokens])
        return [
            TokenPrediction.from_distribution(tok, dist)
            for toks, sent_dists in zip(tokens, dists)
            for tok, dist in zip(toks, sent_dists)
        ]
