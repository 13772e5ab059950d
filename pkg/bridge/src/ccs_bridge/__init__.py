"""Transformer scorer sidecar for the cohort-study pipeline.

Serves the /score wire protocol (relevance scores and 4-way PIO token
distributions) and fine-tunes encoders on the two public corpora with
the stock training recipes.
"""

from .config import BridgeConfig, PIO_RECIPE, RELEVANCE_RECIPE, TrainRecipe
from .model import BridgeModel
from .server import create_app
from .finetune import FinetuneResult, finetune

__all__ = [
    "BridgeConfig", "TrainRecipe", "RELEVANCE_RECIPE", "PIO_RECIPE",
    "BridgeModel", "create_app", "FinetuneResult", "finetune",
]
