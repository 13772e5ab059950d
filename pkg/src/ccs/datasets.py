"""Loaders for the two public corpora in their published layouts.

Evidence-annotated trial reports (sentence relevance):

    <root>/
      annotations_merged.csv          PMCID, Evidence Start, Evidence End, ...
      train_article_ids.txt           (here or under splits/)
      validation_article_ids.txt
      txt_files/PMC<id>.txt

A sentence is labeled relevant iff its span overlaps an evidence span by
at least one character; ``min_overlap_fraction`` tightens that rule.

Token-annotated abstracts (PIO):

    <root>/                           (or <root>/ebm_nlp_2_00/)
      documents/<pmid>.tokens
      annotations/aggregated/starting_spans/<entity>/train/<pmid>.AGGREGATED.ann
      annotations/aggregated/starting_spans/<entity>/test/gold/<pmid>.AGGREGATED.ann

Expert-annotated abstracts form the held-out test partition; the crowd
remainder splits 9:1 into train/validation with a recorded seed. The
entity-to-label collapse ships as a data file next to this module.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import MissingFiles, SchemaMismatch
from .pio import PioLabel
from .textproc import Sentence, byte_offsets, segment

EXPECTED_RELEVANCE_COLUMNS = ("PMCID", "Evidence Start", "Evidence End")


# --- relevance corpus ---


@dataclass
class RelevanceArticle:
    article_id: str
    sentences: list[Sentence]
    labels: list[bool]


@dataclass
class RelevanceDataset:
    split: str
    articles: list[RelevanceArticle]

    @property
    def n_sentences(self) -> int:
        return sum(len(a.sentences) for a in self.articles)


@dataclass
class RelevanceCorpus:
    train: RelevanceDataset
    test: RelevanceDataset
    min_overlap_fraction: float

    @property
    def n_articles(self) -> int:
        return len(self.train.articles) + len(self.test.articles)


def _read_id_list(root: Path, name: str) -> list[str]:
    for candidate in (root / name, root / "splits" / name):
        if candidate.is_file():
            ids = [line.strip() for line in candidate.read_text("utf-8").splitlines()]
            return [i for i in ids if i]
    raise MissingFiles(f"id list not found: {name} (looked in {root} and {root}/splits)")


def _evidence_spans(root: Path) -> dict[str, list[tuple[int, int]]]:
    path = root / "annotations_merged.csv"
    if not path.is_file():
        raise MissingFiles(f"annotations file not found: {path}")
    spans: dict[str, list[tuple[int, int]]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in EXPECTED_RELEVANCE_COLUMNS:
            if col not in header:
                raise SchemaMismatch(f"annotations_merged.csv is missing column {col!r}")
        for row in reader:
            pmcid = row["PMCID"].strip().removeprefix("PMC")
            try:
                start = int(float(row["Evidence Start"]))
                end = int(float(row["Evidence End"]))
            except (TypeError, ValueError):
                continue
            if start < 0 or end <= start:
                continue
            spans.setdefault(pmcid, []).append((start, end))
    return spans


def _label_sentences(
    sentences: list[Sentence],
    evidence_char_spans: list[tuple[int, int]],
    text: str,
    min_overlap_fraction: float,
) -> list[bool]:
    if not evidence_char_spans:
        return [False] * len(sentences)
    to_bytes = byte_offsets(text)
    n = len(text)
    ev_bytes = [
        (to_bytes[min(max(s, 0), n)], to_bytes[min(max(e, 0), n)])
        for s, e in evidence_char_spans
    ]
    labels = []
    for sent in sentences:
        length = sent.char_end - sent.char_start
        overlap = 0
        for ev_start, ev_end in ev_bytes:
            overlap = max(
                overlap, min(sent.char_end, ev_end) - max(sent.char_start, ev_start)
            )
        required = max(1, int(np.ceil(min_overlap_fraction * length)))
        labels.append(overlap >= required)
    return labels


def load_evidence_inference(
    root: str | Path, min_overlap_fraction: float = 0.0
) -> RelevanceCorpus:
    root = Path(root)
    train_ids = _read_id_list(root, "train_article_ids.txt")
    test_ids = _read_id_list(root, "validation_article_ids.txt")
    overlap = set(train_ids) & set(test_ids)
    if overlap:
        raise SchemaMismatch(f"ids present in both splits: {sorted(overlap)[:5]}")

    spans = _evidence_spans(root)

    def build_split(split: str, ids: list[str]) -> RelevanceDataset:
        articles = []
        for article_id in ids:
            txt_path = root / "txt_files" / f"PMC{article_id}.txt"
            if not txt_path.is_file():
                raise MissingFiles(f"article text not found: {txt_path}")
            text = txt_path.read_text(encoding="utf-8")
            sentences = segment(text, pmid=article_id)
            labels = _label_sentences(
                sentences, spans.get(article_id, []), text, min_overlap_fraction
            )
            articles.append(RelevanceArticle(article_id, sentences, labels))
        return RelevanceDataset(split=split, articles=articles)

    return RelevanceCorpus(
        train=build_split("train", train_ids),
        test=build_split("test", test_ids),
        min_overlap_fraction=min_overlap_fraction,
    )


def relevance_checksum(dataset: RelevanceDataset) -> str:
    h = hashlib.sha256()
    for article in dataset.articles:
        h.update(article.article_id.encode())
        h.update(bytes(article.labels))
        for s in article.sentences:
            h.update(s.text.encode("utf-8"))
    return h.hexdigest()[:16]


# --- PIO corpus ---


@dataclass
class PioAbstract:
    abstract_id: str
    tokens: list[str]
    labels: list[PioLabel]


@dataclass
class PioDataset:
    partition: str
    abstracts: list[PioAbstract]

    @property
    def n_tokens(self) -> int:
        return sum(len(a.tokens) for a in self.abstracts)


@dataclass
class PioCorpus:
    crowd_train: PioDataset
    crowd_val: PioDataset
    expert_test: PioDataset
    seed: int

    @property
    def n_abstracts(self) -> int:
        return (
            len(self.crowd_train.abstracts)
            + len(self.crowd_val.abstracts)
            + len(self.expert_test.abstracts)
        )

    @property
    def n_crowd(self) -> int:
        return len(self.crowd_train.abstracts) + len(self.crowd_val.abstracts)


def _entity_label_order() -> list[tuple[str, PioLabel]]:
    text = resources.files("ccs.data").joinpath("pio_label_map.txt").read_text("utf-8")
    order = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        dirname, label_name = line.split()
        order.append((dirname, PioLabel.from_name(label_name)))
    return order


def _parse_ann(path: Path, n_tokens: int) -> list[int]:
    raw = path.read_text(encoding="utf-8").strip()
    values = [v for v in raw.split(",") if v.strip() != ""] if raw else []
    try:
        flags = [int(float(v)) for v in values]
    except ValueError as exc:
        raise SchemaMismatch(f"non-numeric annotation in {path.name}: {exc}") from exc
    if len(flags) != n_tokens:
        raise SchemaMismatch(
            f"{path.name} has {len(flags)} labels for {n_tokens} tokens"
        )
    return flags


def load_ebm_nlp(root: str | Path, seed: int = 42, val_fraction: float = 0.1) -> PioCorpus:
    root = Path(root)
    if not (root / "documents").is_dir():
        nested = root / "ebm_nlp_2_00"
        if (nested / "documents").is_dir():
            root = nested
        else:
            raise MissingFiles(f"no documents/ directory under {root}")
    ann_root = root / "annotations" / "aggregated" / "starting_spans"
    if not ann_root.is_dir():
        raise MissingFiles(f"no aggregated annotations under {root}")

    order = _entity_label_order()
    crowd_ids: set[str] = set()
    expert_ids: set[str] = set()
    for dirname, _ in order:
        for ann in (ann_root / dirname / "train").glob("*.ann"):
            crowd_ids.add(ann.name.split(".")[0])
        for ann in (ann_root / dirname / "test" / "gold").glob("*.ann"):
            expert_ids.add(ann.name.split(".")[0])
    if not crowd_ids and not expert_ids:
        raise MissingFiles(f"no annotation files found under {ann_root}")
    both = crowd_ids & expert_ids
    if both:
        raise SchemaMismatch(f"abstracts in both crowd and expert sets: {sorted(both)[:5]}")

    def build(abstract_id: str, partition_dir: str) -> PioAbstract:
        tokens_path = root / "documents" / f"{abstract_id}.tokens"
        if not tokens_path.is_file():
            raise MissingFiles(f"token file not found: {tokens_path}")
        tokens = tokens_path.read_text(encoding="utf-8").split()
        labels = [PioLabel.NONE] * len(tokens)
        # apply in reverse precedence so the first-listed entity wins
        for dirname, label in reversed(order):
            ann_path = ann_root / dirname / partition_dir / f"{abstract_id}.AGGREGATED.ann"
            if not ann_path.is_file():
                continue
            for i, flag in enumerate(_parse_ann(ann_path, len(tokens))):
                if flag:
                    labels[i] = label
        return PioAbstract(abstract_id, tokens, labels)

    expert = [build(a, "test/gold") for a in sorted(expert_ids)]
    crowd = [build(a, "train") for a in sorted(crowd_ids)]

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(crowd))
    n_val = int(round(val_fraction * len(crowd)))
    val_idx = set(perm[:n_val].tolist())
    crowd_val = [crowd[i] for i in range(len(crowd)) if i in val_idx]
    crowd_train = [crowd[i] for i in range(len(crowd)) if i not in val_idx]

    return PioCorpus(
        crowd_train=PioDataset("crowd_train", crowd_train),
        crowd_val=PioDataset("crowd_val", crowd_val),
        expert_test=PioDataset("expert_test", expert),
        seed=seed,
    )


def pio_checksum(dataset: PioDataset) -> str:
    h = hashlib.sha256()
    for abstract in dataset.abstracts:
        h.update(abstract.abstract_id.encode())
        h.update(bytes(int(l) for l in abstract.labels))
        h.update("\x1f".join(abstract.tokens).encode("utf-8"))
    return h.hexdigest()[:16]
