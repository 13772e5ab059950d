"""The pipeline's bridge scorers against a live sidecar app: the wire
protocol is the only contract between the two packages."""

import pytest
from fastapi.testclient import TestClient

from ccs.errors import ScorerUnavailable
from ccs.pio import BridgePioTagger, decode_spans
from ccs.relevance import BridgeRelevanceScorer, score_article
from ccs.summarize import summarize
from ccs.textproc import segment
from ccs.wire import BridgeClient

from ccs_bridge import BridgeConfig, create_app

ABSTRACT = (
    "Adults with colorectal cancer were randomized to beta-blockers or placebo. "
    "The primary outcome was overall survival at 12 months. "
    "Beta-blocker use was associated with improved survival (HR 0.85). "
    "Adverse events were similar between groups. "
    "These findings support further trials."
)


def client_post_via(test_client):
    def post(url, payload, timeout):
        resp = test_client.post("/score", json=payload)
        if resp.status_code != 200:
            raise ScorerUnavailable(f"bridge returned {resp.status_code}")
        return resp.json()

    return post


class TestEndToEnd:
    def test_relevance_scorer_through_wire(self):
        sentences = segment(ABSTRACT, pmid="42")
        with TestClient(create_app(BridgeConfig(task="relevance"))) as tc:
            scorer = BridgeRelevanceScorer(
                BridgeClient("http://bridge", post=client_post_via(tc))
            )
            results = score_article(sentences, scorer)
            assert len(results) == len(sentences)
            summary = summarize(results, sentences, k=2)
            assert 0.0 <= summary.summary_score <= 1.0
            assert summary.summary_text

    def test_pio_tagger_through_wire(self):
        sentences = segment(ABSTRACT, pmid="42")
        with TestClient(create_app(BridgeConfig(task="pio"))) as tc:
            tagger = BridgePioTagger(
                BridgeClient("http://bridge", post=client_post_via(tc))
            )
            predictions = tagger.tag_article(sentences)
            assert predictions
            spans = decode_spans(predictions, sentences, pmid="42")
            for span in spans:
                assert span.surface_text in ABSTRACT

    def test_down_bridge_surfaces_scorer_unavailable(self):
        def dead_post(url, payload, timeout):
            raise ScorerUnavailable("connection refused")

        scorer = BridgeRelevanceScorer(BridgeClient("http://down", post=dead_post))
        sentences = segment(ABSTRACT, pmid="42")
        with pytest.raises(ScorerUnavailable):
            scorer.score(sentences)
