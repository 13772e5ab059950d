"""Fine-tuning on the public corpora at whatever scale fits the machine.

Datasets load through the pipeline package's harness loaders, and the
held-out metric report uses the same harness definitions, so bridge
numbers are directly comparable with the native baseline's. Training
follows the stock recipes (relevance: Adam, lr 1e-5, batch 16, 4 epochs;
pio: AdamW, lr 1e-4, batch 6, 2 epochs) on the tiny built-in encoder or
any future drop-in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn

from ccs.datasets import load_ebm_nlp, load_evidence_inference
from ccs.evalrun import EvalConfig, run_eval
from ccs.pio import argmax_label  # noqa: F401  (re-exported for callers)

from .config import BridgeConfig
from .encoder import simple_tokenize
from .model import BridgeModel


@dataclass
class FinetuneResult:
    checkpoint: Path
    epoch_losses: list[float]
    report_path: Path | None
    metrics: dict = field(default_factory=dict)


class _BridgeRelevanceAdapter:
    """Duck-typed scorer for the harness: sentences in, floats out."""

    def __init__(self, model: BridgeModel):
        self.model = model

    @property
    def identifier(self) -> str:
        return "bridge-finetuned-relevance"

    def score(self, sentences) -> list[float]:
        scores, _ = self.model.score_relevance([s.text for s in sentences])
        return scores


class _BridgePioAdapter:
    def __init__(self, model: BridgeModel):
        self.model = model

    @property
    def identifier(self) -> str:
        return "bridge-finetuned-pio"

    def tag_token_lists(self, token_lists):
        import numpy as np

        dists, _ = self.model.score_pio([list(t) for t in token_lists])
        return [[np.asarray(d) for d in per_sentence] for per_sentence in dists]


def _make_optimizer(model: nn.Module, recipe) -> torch.optim.Optimizer:
    if recipe.optimizer == "adamw":
        return torch.optim.AdamW(
            model.parameters(), lr=recipe.learning_rate, weight_decay=recipe.weight_decay
        )
    return torch.optim.Adam(model.parameters(), lr=recipe.learning_rate)


class OutOfMemory(RuntimeError):
    """Device memory exhausted; carries actionable guidance."""


def _oom_guard(exc: RuntimeError, batch_size: int) -> RuntimeError:
    if "out of memory" in str(exc).lower():
        return OutOfMemory(
            f"device ran out of memory at batch size {batch_size}; retry with "
            f"--batch-size {max(1, batch_size // 2)} or a smaller "
            f"max_sequence_length"
        )
    return exc


def finetune(
    task: str,
    dataset_path: str | Path,
    config: BridgeConfig | None = None,
    out_dir: str | Path = "bridge-runs",
    subsample: int | None = None,
    freeze_encoder: bool = False,
) -> FinetuneResult:
    """Train the head (and, unless frozen, the encoder) on the given
    corpus; write a checkpoint, the loss curve, and a harness metric
    report on the held-out split."""
    config = config or BridgeConfig(task=task)
    if config.task != task:
        raise ValueError("config.task does not match the requested task")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    model = BridgeModel(config)
    if freeze_encoder:
        for parameter in model.encoder.parameters():
            parameter.requires_grad_(False)
    recipe = config.train
    optimizer = _make_optimizer(model, recipe)
    generator = torch.Generator().manual_seed(recipe.seed)

    if task == "relevance":
        corpus = load_evidence_inference(dataset_path)
        articles = corpus.train.articles
        if subsample is not None:
            articles = articles[:subsample]
        texts = [s.text for a in articles for s in a.sentences]
        labels = [float(l) for a in articles for l in a.labels]
        n = len(texts)
        loss_fn = nn.BCEWithLogitsLoss()

        epoch_losses = []
        for _ in range(recipe.epochs):
            order = torch.randperm(n, generator=generator).tolist()
            total = 0.0
            model.train()
            for lo in range(0, n, recipe.batch_size):
                batch_idx = order[lo : lo + recipe.batch_size]
                try:
                    token_lists = [simple_tokenize(texts[i]) for i in batch_idx]
                    ids, pad_mask, _ = model.encoder.encode_ids(token_lists)
                    hidden = model.encoder(ids, pad_mask)
                    keep = (~pad_mask).unsqueeze(-1).float()
                    pooled = (hidden * keep).sum(1) / keep.sum(1).clamp(min=1.0)
                    logits = model.head(pooled).squeeze(-1)
                    target = torch.tensor([labels[i] for i in batch_idx])
                    loss = loss_fn(logits, target)
                    optimizer.zero_grad()
                    loss.backward()
                    optimizer.step()
                except RuntimeError as exc:
                    raise _oom_guard(exc, recipe.batch_size) from exc
                total += loss.item() * len(batch_idx)
            epoch_losses.append(total / n)

        adapter = _BridgeRelevanceAdapter(model)
        report, report_path = run_eval(
            "relevance", adapter, corpus.test, EvalConfig(out_dir=out_dir)
        )
    else:
        corpus = load_ebm_nlp(dataset_path, seed=recipe.seed)
        abstracts = corpus.crowd_train.abstracts
        if subsample is not None:
            abstracts = abstracts[:subsample]
        n = len(abstracts)
        loss_fn = nn.CrossEntropyLoss()

        epoch_losses = []
        for _ in range(recipe.epochs):
            order = torch.randperm(n, generator=generator).tolist()
            total = total_tokens = 0
            model.train()
            for lo in range(0, n, recipe.batch_size):
                batch = [abstracts[i] for i in order[lo : lo + recipe.batch_size]]
                try:
                    token_lists = [a.tokens for a in batch]
                    ids, pad_mask, _ = model.encoder.encode_ids(token_lists)
                    hidden = model.encoder(ids, pad_mask)
                    logits = model.head(hidden)
                    width = ids.shape[1]
                    target = torch.full((len(batch), width), -100, dtype=torch.long)
                    for row, abstract in enumerate(batch):
                        m = min(len(abstract.tokens), width)
                        target[row, :m] = torch.tensor(
                            [int(l) for l in abstract.labels[:m]], dtype=torch.long
                        )
                    loss = loss_fn(logits.reshape(-1, 4), target.reshape(-1))
                    optimizer.zero_grad()
                    loss.backward()
                    optimizer.step()
                except RuntimeError as exc:
                    raise _oom_guard(exc, recipe.batch_size) from exc
                n_tokens = int((target != -100).sum())
                total += loss.item() * n_tokens
                total_tokens += n_tokens
            epoch_losses.append(total / max(1, total_tokens))

        adapter = _BridgePioAdapter(model)
        report, report_path = run_eval(
            "pio", adapter, corpus.crowd_val, EvalConfig(out_dir=out_dir)
        )

    checkpoint = out_dir / f"{task}-checkpoint.pt"
    model.save(checkpoint)
    (out_dir / f"{task}-loss-curve.json").write_text(
        json.dumps({"epoch_losses": epoch_losses}, indent=2)
    )
    return FinetuneResult(
        checkpoint=checkpoint,
        epoch_losses=epoch_losses,
        report_path=report_path,
        metrics=report.metrics,
    )
