import json
import math

import numpy as np
import pytest

from ccs.errors import DegenerateData, DimensionMismatch, ScorerUnavailable
from ccs.relevance import (
    EPSILON,
    FEATURE_DIM,
    BaselineRelevanceScorer,
    BridgeRelevanceScorer,
    HeadParameters,
    TrainConfig,
    bce_loss,
    bce_sigmoid_gradients,
    featurize,
    score_article,
    score_head,
    sigmoid,
    train_baseline,
)
from ccs.textproc import Sentence, segment
from ccs.wire import BridgeClient

from conftest import FIXTURES


def make_sentences(texts, pmid="1"):
    return [Sentence(pmid, i, t, 0, 0) for i, t in enumerate(texts)]


class TestSigmoidHead:
    def test_zero_params_give_half(self):
        params = HeadParameters(np.zeros(4), 0.0)
        assert score_head(np.array([3.0, -1.0, 2.0, 9.0]), params) == 0.5

    def test_saturation(self):
        params = HeadParameters(np.array([1.0]), 0.0)
        assert score_head(np.array([0.0]), params) == 0.5
        assert score_head(np.array([40.0]), params) == pytest.approx(1.0, abs=1e-15)
        assert score_head(np.array([-40.0]), params) == pytest.approx(0.0, abs=1e-15)

    def test_analytic_value(self):
        # sigma(1.5) computed to high precision: 0.81757447619364365...
        params = HeadParameters(np.array([2.0, -1.0]), 0.5)
        assert score_head(np.array([1.0, 1.0]), params) == pytest.approx(
            0.8175744761936437, abs=1e-12
        )

    def test_extreme_z_no_overflow(self):
        assert sigmoid(500.0) == 1.0
        assert sigmoid(-500.0) == pytest.approx(0.0, abs=1e-200)
        assert np.isfinite(sigmoid(np.array([-500.0, 500.0]))).all()

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            score_head(np.zeros(3), HeadParameters(np.zeros(4), 0.0))

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            z = rng.normal(scale=5)
            assert sigmoid(z) + sigmoid(-z) == pytest.approx(1.0, abs=1e-12)


class TestBceLoss:
    def test_perfect_prediction(self):
        assert bce_loss(1, 1 - EPSILON) == pytest.approx(0.0, abs=1e-10)

    def test_half(self):
        assert bce_loss(1, 0.5) == pytest.approx(math.log(2), abs=1e-12)

    def test_wrong_confident(self):
        assert bce_loss(0, 0.9) == pytest.approx(-math.log(0.1), abs=1e-12)

    def test_clamping_no_infinity(self):
        assert np.isfinite(bce_loss(1, 0.0))
        assert np.isfinite(bce_loss(0, 1.0))


class TestGradients:
    def test_analytic_equals_delta_rule(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            h = rng.normal(size=6)
            params = HeadParameters(rng.normal(size=6), float(rng.normal()))
            y = float(rng.integers(2))
            gw, gb = bce_sigmoid_gradients(h, params, y)
            p = score_head(h, params)
            assert np.allclose(gw, (p - y) * h, rtol=1e-12)
            assert gb == pytest.approx(p - y, rel=1e-12)

    def test_finite_difference_oracle(self):
        rng = np.random.default_rng(2)
        eps = 1e-6
        for _ in range(100):
            dim = int(rng.integers(2, 8))
            h = rng.normal(size=dim)
            w = rng.normal(size=dim)
            b = float(rng.normal())
            y = float(rng.integers(2))
            gw, gb = bce_sigmoid_gradients(h, HeadParameters(w, b), y)

            def loss(w_, b_):
                return bce_loss(y, score_head(h, HeadParameters(w_, b_)))

            numeric_w = np.zeros(dim)
            for j in range(dim):
                bump = np.zeros(dim)
                bump[j] = eps
                numeric_w[j] = (loss(w + bump, b) - loss(w - bump, b)) / (2 * eps)
            numeric_b = (loss(w, b + eps) - loss(w, b - eps)) / (2 * eps)

            full_numeric = np.append(numeric_w, numeric_b)
            full_analytic = np.append(gw, gb)
            rel = np.linalg.norm(full_numeric - full_analytic) / max(
                np.linalg.norm(full_numeric), np.linalg.norm(full_analytic), 1e-12
            )
            assert rel < 1e-6


class TestFeaturize:
    def test_deterministic(self):
        (s,) = make_sentences(["Beta-blockers significantly reduced risk."])
        a = featurize(s, 10)
        b = featurize(s, 10)
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.values, b.values)

    def test_unit_norm(self):
        (s,) = make_sentences(["The hazard ratio was 0.85 with p = 0.01."])
        vec = featurize(s, 5)
        assert np.linalg.norm(vec.values) == pytest.approx(1.0, abs=1e-12)

    def test_empty_sentence_has_position_and_length_only(self):
        (s,) = make_sentences([""])
        vec = featurize(s, 4)
        assert (vec.indices >= 2**18).all()
        assert len(vec.indices) >= 1  # length bucket always fires

    def test_dim(self):
        (s,) = make_sentences(["word"])
        assert featurize(s, 1).dim == FEATURE_DIM


class TestTrainBaseline:
    def test_separable_set_reaches_perfect_accuracy(self):
        texts_pos = [f"treatment significantly improved outcome {i}" for i in range(10)]
        texts_neg = [f"patients were recruited at site {i}" for i in range(10)]
        dataset = [
            (s, 1) for s in make_sentences(texts_pos, pmid="1")
        ] + [(s, 0) for s in make_sentences(texts_neg, pmid="2")]
        result = train_baseline(dataset, TrainConfig(epochs=30, batch_size=4, seed=0))
        scorer = BaselineRelevanceScorer(result.params)
        for sentence, label in dataset:
            score = scorer.score([sentence])[0]
            assert (score >= 0.5) == bool(label)
        assert result.epoch_losses[-1] < result.epoch_losses[0]

    def test_single_class_rejected(self):
        dataset = [(s, 1) for s in make_sentences(["a", "b"])]
        with pytest.raises(DegenerateData):
            train_baseline(dataset)

    def test_seeded_determinism_bitwise(self):
        texts = [f"sentence number {i} with outcome data" for i in range(12)]
        dataset = [(s, i % 2) for i, s in enumerate(make_sentences(texts))]
        cfg = TrainConfig(epochs=3, batch_size=4, seed=9)
        r1 = train_baseline(dataset, cfg)
        r2 = train_baseline(dataset, cfg)
        assert np.array_equal(r1.params.weights, r2.params.weights)
        assert r1.params.bias == r2.params.bias
        assert r1.epoch_losses == r2.epoch_losses


class TestScoreArticle:
    def test_shape_and_order(self):
        sentences = make_sentences([f"sentence {i}" for i in range(10)])
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        results = score_article(sentences, scorer)
        assert [r.sentence_index for r in results] == list(range(10))

    def test_identical_sentences_identical_scores(self):
        sentences = make_sentences(["same text here"] * 5)
        # identical index-position matters; force same index features
        sentences = [Sentence("1", 0, "same text here", 0, 0) for _ in range(5)]
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        scores = {r.score for r in score_article(sentences, scorer)}
        assert len(scores) == 1

    def test_threshold_boundary_inclusive(self):
        sentences = make_sentences(["x"])
        scorer = BaselineRelevanceScorer(HeadParameters.zeros())
        (result,) = score_article(sentences, scorer, threshold=0.5)
        assert result.score == 0.5 and result.label is True

    def test_scoring_is_read_only(self):
        sentences = make_sentences(["a", "b"])
        params = HeadParameters(np.ones(FEATURE_DIM), 0.25)
        scorer = BaselineRelevanceScorer(params)
        before = params.weights.copy()
        score_article(sentences, scorer)
        assert np.array_equal(params.weights, before) and params.bias == 0.25


class TestBridgeScorer:
    def test_replays_recorded_scores_exactly(self, replay_client):
        (article,) = replay_client.fetch(["23255459"])
        sentences = segment(article.abstract_text, pmid=article.pmid)
        recorded = json.loads((FIXTURES / "bridge_relevance.json").read_text())
        assert len(recorded["scores"]) == len(sentences)

        def fake_post(url, payload, timeout):
            assert payload == {
                "task": "relevance",
                "sentences": [s.text for s in sentences],
            }
            return {"scores": recorded["scores"]}

        scorer = BridgeRelevanceScorer(BridgeClient("http://bridge", post=fake_post))
        results = score_article(sentences, scorer)
        assert [r.score for r in results] == recorded["scores"]

    def test_bridge_down_raises_scorer_unavailable(self):
        def dead_post(url, payload, timeout):
            raise ScorerUnavailable("down")

        scorer = BridgeRelevanceScorer(BridgeClient("http://bridge", post=dead_post))
        with pytest.raises(ScorerUnavailable):
            scorer.score(make_sentences(["a"]))

    def test_save_load_round_trip(self, tmp_path):
        params = HeadParameters(np.linspace(-1, 1, FEATURE_DIM), 0.125)
        BaselineRelevanceScorer(params).save(tmp_path / "m.npz")
        loaded = BaselineRelevanceScorer.load(tmp_path / "m.npz")
        assert np.array_equal(loaded.params.weights, params.weights)
        assert loaded.params.bias == params.bias
