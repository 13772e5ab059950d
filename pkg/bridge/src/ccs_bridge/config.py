"""Bridge configuration with per-task training defaults.

Relevance fine-tuning: batch 16, lr 1e-5, 4 epochs, Adam.
PIO fine-tuning: batch 6, lr 1e-4, 2 epochs, AdamW.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field


@dataclass
class TrainRecipe:
    learning_rate: float
    batch_size: int
    epochs: int
    optimizer: str
    seed: int = 42
    weight_decay: float = 0.01  # only used by adamw


RELEVANCE_RECIPE = TrainRecipe(learning_rate=1e-5, batch_size=16, epochs=4, optimizer="adam")
PIO_RECIPE = TrainRecipe(learning_rate=1e-4, batch_size=6, epochs=2, optimizer="adamw")


@dataclass
class BridgeConfig:
    encoder_name: str = "tiny"
    task: str = "relevance"
    device: str = field(default_factory=lambda: os.environ.get("BRIDGE_DEVICE", "cpu"))
    max_sequence_length: int = 128
    seed: int = 0
    train: TrainRecipe | None = None

    def __post_init__(self):
        if self.task not in ("relevance", "pio"):
            raise ValueError(f"unknown task: {self.task!r}")
        if self.max_sequence_length < 8:
            raise ValueError("max_sequence_length too small")
        if self.train is None:
            self.train = RELEVANCE_RECIPE if self.task == "relevance" else PIO_RECIPE
