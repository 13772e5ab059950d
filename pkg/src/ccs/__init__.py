"""Clinical cohort study exploration toolkit.

Compile a disease name into an advanced PubMed query, harvest and parse
the resulting articles, score every sentence for relevance, emit top-k
extractive summaries with a summary score, and extract scored
Patient/Intervention/Outcome entities, plus the evaluation harness for
the two public training corpora.
"""

from .query import QuerySpec, Term, build_query, render, query_string
from .pubmed import NcbiCredentials, PmidList, PubMedClient, RawArticle
from .textproc import Sentence, Token, segment, tokenize
from .relevance import (
    BaselineRelevanceScorer,
    HeadParameters,
    RelevanceResult,
    TrainConfig,
    bce_loss,
    score_article,
    score_head,
    sigmoid,
    train_baseline,
)
from .summarize import Summary, batch_summaries, summarize
from .pio import (
    BaselinePioTagger,
    EntitySpan,
    EntityTableRow,
    HeadParameters4,
    PioLabel,
    TokenPrediction,
    aggregate_entities,
    cross_entropy,
    decode_spans,
    softmax_head,
    train_tagger,
)
from .metrics import MetricReport, auc_score, binary_metrics, pio_metrics
from .datasets import load_ebm_nlp, load_evidence_inference
from .evalrun import EvalConfig, run_eval
from .pipeline import Pipeline, RunOptions
from .settings import Settings

__version__ = "0.1.0"

__all__ = [
    "QuerySpec", "Term", "build_query", "render", "query_string",
    "NcbiCredentials", "PmidList", "PubMedClient", "RawArticle",
    "Sentence", "Token", "segment", "tokenize",
    "BaselineRelevanceScorer", "HeadParameters", "RelevanceResult",
    "TrainConfig", "bce_loss", "score_article", "score_head", "sigmoid",
    "train_baseline",
    "Summary", "batch_summaries", "summarize",
    "BaselinePioTagger", "EntitySpan", "EntityTableRow", "HeadParameters4",
    "PioLabel", "TokenPrediction", "aggregate_entities", "cross_entropy",
    "decode_spans", "softmax_head", "train_tagger",
    "MetricReport", "auc_score", "binary_metrics", "pio_metrics",
    "load_ebm_nlp", "load_evidence_inference",
    "EvalConfig", "run_eval",
    "Pipeline", "RunOptions", "Settings",
    "__version__",
]
