"""Task models: encoder plus a dense head per task.

Relevance: mean-pooled sentence representation through linear + sigmoid.
PIO: per-token representations through a 4-way linear + softmax.
Inference runs under no_grad in eval mode, so identical payloads produce
bit-identical outputs for fixed weights.
"""

from __future__ import annotations

from pathlib import Path

import torch
from torch import nn

from .config import BridgeConfig
from .encoder import TinyEncoder, simple_tokenize


class BridgeModel(nn.Module):
    def __init__(self, config: BridgeConfig):
        super().__init__()
        self.config = config
        self.encoder = TinyEncoder(max_len=config.max_sequence_length, seed=config.seed)
        out = 1 if config.task == "relevance" else 4
        torch.manual_seed(config.seed + 1)
        self.head = nn.Linear(self.encoder.dim, out)
        self.to(config.device)

    # --- inference ---

    @torch.no_grad()
    def score_relevance(self, sentences: list[str]) -> tuple[list[float], list[str]]:
        self.eval()
        if not sentences:
            return [], []
        token_lists = [simple_tokenize(s) for s in sentences]
        ids, pad_mask, truncated = self.encoder.encode_ids(token_lists)
        hidden = self.encoder(ids.to(self.config.device), pad_mask.to(self.config.device))
        keep = (~pad_mask).unsqueeze(-1).float().to(self.config.device)
        pooled = (hidden * keep).sum(1) / keep.sum(1).clamp(min=1.0)
        scores = torch.sigmoid(self.head(pooled)).squeeze(-1)
        warnings = [
            f"sentence {i} truncated to {self.config.max_sequence_length} tokens"
            for i, was in enumerate(truncated) if was
        ]
        return [float(s) for s in scores], warnings

    @torch.no_grad()
    def score_pio(self, token_lists: list[list[str]]) -> tuple[list[list[list[float]]], list[str]]:
        self.eval()
        if not token_lists:
            return [], []
        ids, pad_mask, truncated = self.encoder.encode_ids(token_lists)
        hidden = self.encoder(ids.to(self.config.device), pad_mask.to(self.config.device))
        probs = torch.softmax(self.head(hidden), dim=-1)
        out: list[list[list[float]]] = []
        max_len = self.config.max_sequence_length
        for i, toks in enumerate(token_lists):
            n_model = min(len(toks), max_len) if toks else 0
            dists = [[float(x) for x in probs[i, j]] for j in range(n_model)]
            # tokens beyond the truncation point echo the last distribution
            # so the response stays aligned with the request
            while len(dists) < len(toks):
                dists.append(list(dists[-1]))
            out.append(dists)
        warnings = [
            f"sentence {i} truncated to {max_len} tokens"
            for i, was in enumerate(truncated) if was
        ]
        return out, warnings

    # --- persistence ---

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(
            {
                "state_dict": self.state_dict(),
                "task": self.config.task,
                "max_sequence_length": self.config.max_sequence_length,
                "seed": self.config.seed,
            },
            path,
        )

    @classmethod
    def load(cls, path: str | Path, device: str = "cpu") -> "BridgeModel":
        payload = torch.load(path, map_location=device, weights_only=True)
        config = BridgeConfig(
            task=payload["task"],
            device=device,
            max_sequence_length=payload["max_sequence_length"],
            seed=payload["seed"],
        )
        model = cls(config)
        model.load_state_dict(payload["state_dict"])
        return model
