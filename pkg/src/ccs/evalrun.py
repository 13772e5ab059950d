"""Evaluation runs: score a loaded dataset with a scorer and persist a
report. Reports are JSON, schema-versioned, and deterministic given the
same scorer parameters, dataset, and config (timing lives in its own
key so the rest of the body is byte-stable)."""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .cache import atomic_write_bytes
from .datasets import (
    PioDataset,
    RelevanceDataset,
    pio_checksum,
    relevance_checksum,
)
from .metrics import MetricReport, binary_metrics, pio_metrics
from .pio import argmax_label

REPORT_SCHEMA_VERSION = 1


@dataclass
class EvalConfig:
    threshold: float = 0.5
    workers: int = 4
    out_dir: str | Path | None = None


def _digest(parts: dict) -> str:
    blob = json.dumps(parts, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def run_eval(task: str, scorer, dataset, config: EvalConfig | None = None):
    """Evaluate ``scorer`` on ``dataset``; returns (MetricReport, path)
    where path is None unless ``config.out_dir`` is set."""
    config = config or EvalConfig()
    started = time.perf_counter()

    if task == "relevance":
        assert isinstance(dataset, RelevanceDataset)
        checksum = relevance_checksum(dataset)
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            scored = list(pool.map(lambda a: scorer.score(a.sentences), dataset.articles))
        labels = [int(l) for a in dataset.articles for l in a.labels]
        scores = [s for per_article in scored for s in per_article]
        report = binary_metrics(labels, scores, threshold=config.threshold)
        n_units = len(labels)
    elif task == "pio":
        assert isinstance(dataset, PioDataset)
        checksum = pio_checksum(dataset)
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            tagged = list(
                pool.map(lambda a: scorer.tag_token_lists([a.tokens])[0], dataset.abstracts)
            )
        gold = [l for a in dataset.abstracts for l in a.labels]
        pred = [argmax_label(d) for dists in tagged for d in dists]
        report = pio_metrics(gold, pred)
        n_units = len(gold)
    else:
        raise ValueError(f"unknown eval task: {task!r}")

    split = getattr(dataset, "split", None) or getattr(dataset, "partition", "")
    report.config_digest = _digest(
        {
            "task": task,
            "scorer": scorer.identifier,
            "threshold": config.threshold,
            "split": split,
            "dataset": checksum,
        }
    )
    elapsed = time.perf_counter() - started

    path = None
    if config.out_dir is not None:
        body = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "task": task,
            "split": split,
            "scorer": scorer.identifier,
            "metrics": report.metrics,
            "per_entity": report.per_entity,
            "config_digest": report.config_digest,
            "dataset": {
                "checksum": checksum,
                "n_examples": len(getattr(dataset, "articles", getattr(dataset, "abstracts", []))),
                "n_units": n_units,
            },
            "timing": {"seconds": elapsed},
        }
        out_dir = Path(config.out_dir)
        path = out_dir / f"report-{task}-{report.config_digest}.json"
        atomic_write_bytes(path, json.dumps(body, indent=2, sort_keys=True).encode("utf-8"))
    return report, path
