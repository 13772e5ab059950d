"""Built-in tiny transformer encoder.

A hashed-vocabulary embedding plus a small transformer stack, seeded so
construction is reproducible without downloading any checkpoint. Plenty
for wire-protocol conformance, determinism testing, and smoke-scale
fine-tuning; swap in a real pretrained encoder for production scoring.
"""

from __future__ import annotations

import hashlib
import re

import torch
from torch import nn

PAD_ID = 0
VOCAB_BITS = 12
VOCAB_SIZE = (1 << VOCAB_BITS) + 1  # +1 for padding at index 0

_TOKEN_RE = re.compile(r"\w+(?:[-=/]\w+)*|[^\w\s]")


def simple_tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def hash_token(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return (int.from_bytes(digest, "little") & ((1 << VOCAB_BITS) - 1)) + 1


class TinyEncoder(nn.Module):
    def __init__(self, dim: int = 64, layers: int = 2, heads: int = 4,
                 max_len: int = 128, seed: int = 0):
        super().__init__()
        torch.manual_seed(seed)
        self.dim = dim
        self.max_len = max_len
        self.embed = nn.Embedding(VOCAB_SIZE, dim, padding_idx=PAD_ID)
        self.pos = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim, nhead=heads, dim_feedforward=4 * dim,
            batch_first=True, dropout=0.0,
        )
        self.stack = nn.TransformerEncoder(layer, num_layers=layers)

    def encode_ids(self, token_lists: list[list[str]]) -> tuple[torch.Tensor, torch.Tensor, list[bool]]:
        """Hash tokens to ids, truncate at max_len, pad to batch. Returns
        (ids, padding_mask, truncated_flags)."""
        truncated = [len(toks) > self.max_len for toks in token_lists]
        clipped = [toks[: self.max_len] or ["<empty>"] for toks in token_lists]
        width = max(len(t) for t in clipped)
        ids = torch.full((len(clipped), width), PAD_ID, dtype=torch.long)
        for i, toks in enumerate(clipped):
            ids[i, : len(toks)] = torch.tensor([hash_token(t) for t in toks])
        return ids, ids.eq(PAD_ID), truncated

    def forward(self, ids: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        x = self.embed(ids) + self.pos(positions)[None, :, :]
        return self.stack(x, src_key_padding_mask=pad_mask)
