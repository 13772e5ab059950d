import json

import pytest

from ccs.datasets import load_ebm_nlp, load_evidence_inference
from ccs.errors import ScorerUnavailable
from ccs.evalrun import EvalConfig, run_eval
from ccs.pio import BaselinePioTagger, HeadParameters4
from ccs.relevance import BaselineRelevanceScorer, HeadParameters

from synthetic import make_ebm_nlp, make_evidence_inference


@pytest.fixture(scope="module")
def ei_corpus(tmp_path_factory):
    root = make_evidence_inference(tmp_path_factory.mktemp("ei"), n_articles=20, seed=9)
    return load_evidence_inference(root)


@pytest.fixture(scope="module")
def ebm_corpus(tmp_path_factory):
    root = make_ebm_nlp(tmp_path_factory.mktemp("ebm"), n_crowd=6, n_expert=2, seed=9)
    return load_ebm_nlp(root)


class FailingScorer:
    identifier = "failing"

    def score(self, sentences):
        raise ScorerUnavailable("bridge offline")


class TestRunEval:
    def test_relevance_report_shape(self, ei_corpus, tmp_path):
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        report, path = run_eval(
            "relevance", scorer, ei_corpus.test, EvalConfig(out_dir=tmp_path)
        )
        for key in ("accuracy", "precision", "recall", "f1", "auc_roc"):
            assert key in report.metrics
        assert path.is_file()
        body = json.loads(path.read_text())
        assert body["schema_version"] == 1
        assert body["task"] == "relevance"
        assert body["config_digest"] == report.config_digest

    def test_pio_report_shape(self, ebm_corpus, tmp_path):
        tagger = BaselinePioTagger(HeadParameters4.zeros())
        report, path = run_eval(
            "pio", tagger, ebm_corpus.expert_test, EvalConfig(out_dir=tmp_path)
        )
        assert set(report.per_entity) == {"Patient", "Intervention", "Outcome"}
        assert "entity_f1_mean" in report.metrics
        assert "micro_f1_pooled" in report.metrics
        assert path.is_file()

    def test_deterministic_bodies_excluding_timing(self, ei_corpus, tmp_path):
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        _, p1 = run_eval("relevance", scorer, ei_corpus.test, EvalConfig(out_dir=tmp_path / "a"))
        _, p2 = run_eval("relevance", scorer, ei_corpus.test, EvalConfig(out_dir=tmp_path / "b"))
        a = json.loads(p1.read_text())
        b = json.loads(p2.read_text())
        a.pop("timing")
        b.pop("timing")
        assert a == b

    def test_scorer_failure_leaves_no_partial_report(self, ei_corpus, tmp_path):
        with pytest.raises(ScorerUnavailable):
            run_eval("relevance", FailingScorer(), ei_corpus.test, EvalConfig(out_dir=tmp_path))
        assert list(tmp_path.glob("*.json")) == []

    def test_unknown_task(self, ei_corpus):
        with pytest.raises(ValueError):
            run_eval("summarize", None, ei_corpus.test)

    def test_no_out_dir_returns_no_path(self, ei_corpus):
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        report, path = run_eval("relevance", scorer, ei_corpus.test)
        assert path is None and report.config_digest
