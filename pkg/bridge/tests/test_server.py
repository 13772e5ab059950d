import numpy as np
import pytest
from fastapi.testclient import TestClient

from ccs.wire import validate_pio_response, validate_relevance_response

from ccs_bridge import BridgeConfig, create_app


@pytest.fixture(scope="module")
def relevance_client():
    with TestClient(create_app(BridgeConfig(task="relevance", max_sequence_length=32))) as c:
        yield c


@pytest.fixture(scope="module")
def pio_client():
    with TestClient(create_app(BridgeConfig(task="pio", max_sequence_length=32))) as c:
        yield c


def random_sentence(rng):
    words = ["patients", "randomized", "propranolol", "survival", "0.85",
             "significantly", "the", "of", "reduced", "(n=120)"]
    return " ".join(words[i] for i in rng.integers(0, len(words), size=rng.integers(1, 20)))


class TestWireConformance:
    def test_relevance_responses_validate(self, relevance_client):
        rng = np.random.default_rng(0)
        for _ in range(25):
            sentences = [random_sentence(rng) for _ in range(int(rng.integers(1, 8)))]
            resp = relevance_client.post(
                "/score", json={"task": "relevance", "sentences": sentences}
            )
            assert resp.status_code == 200
            scores = validate_relevance_response(resp.json(), len(sentences))
            assert all(0.0 <= s <= 1.0 for s in scores)

    def test_pio_responses_validate(self, pio_client):
        rng = np.random.default_rng(1)
        for _ in range(25):
            token_lists = [
                random_sentence(rng).split() for _ in range(int(rng.integers(1, 5)))
            ]
            resp = pio_client.post("/score", json={"task": "pio", "sentences": token_lists})
            assert resp.status_code == 200
            dists = validate_pio_response(resp.json(), [len(t) for t in token_lists])
            for per_sentence in dists:
                for dist in per_sentence:
                    assert abs(sum(dist) - 1.0) < 1e-6

    def test_empty_sentence_lists(self, relevance_client, pio_client):
        resp = relevance_client.post("/score", json={"task": "relevance", "sentences": []})
        assert resp.status_code == 200 and resp.json()["scores"] == []
        resp = pio_client.post("/score", json={"task": "pio", "sentences": [[]]})
        assert resp.status_code == 200 and resp.json()["distributions"] == [[]]


class TestDeterminism:
    def test_relevance_bit_stable(self, relevance_client):
        payload = {"task": "relevance", "sentences": ["Beta-blockers improved survival.",
                                                      "Patients enrolled at 12 sites."]}
        first = relevance_client.post("/score", json=payload)
        second = relevance_client.post("/score", json=payload)
        assert first.content == second.content

    def test_pio_bit_stable(self, pio_client):
        payload = {"task": "pio", "sentences": [["Adults", "with", "cancer"],
                                                ["placebo", "."]]}
        first = pio_client.post("/score", json=payload)
        second = pio_client.post("/score", json=payload)
        assert first.content == second.content

    def test_fresh_model_same_seed_same_scores(self):
        payload = {"task": "relevance", "sentences": ["The primary endpoint was met."]}
        outputs = []
        for _ in range(2):
            with TestClient(create_app(BridgeConfig(task="relevance"))) as client:
                outputs.append(client.post("/score", json=payload).content)
        assert outputs[0] == outputs[1]


class TestPayloadValidation:
    @pytest.mark.parametrize(
        "payload",
        [
            {"task": "nope", "sentences": []},
            {"sentences": ["a"]},
            {"task": "relevance", "sentences": "not a list"},
            {"task": "relevance", "sentences": [1, 2]},
            {"task": "pio", "sentences": ["flat strings"]},
            {"task": "pio", "sentences": [[1, 2]]},
        ],
    )
    def test_shape_errors_422(self, relevance_client, pio_client, payload):
        client = pio_client if payload.get("task") == "pio" else relevance_client
        resp = client.post("/score", json=payload)
        assert resp.status_code == 422
        assert resp.json()["code"] == "invalid_payload"

    def test_task_mismatch_422(self, relevance_client):
        resp = relevance_client.post("/score", json={"task": "pio", "sentences": [["a"]]})
        assert resp.status_code == 422

    def test_oversized_input_truncated_with_warning(self, relevance_client):
        long_sentence = "tokens " * 100
        resp = relevance_client.post(
            "/score", json={"task": "relevance", "sentences": [long_sentence]}
        )
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["scores"]) == 1
        assert any("truncated" in w for w in body["warnings"])

    def test_pio_truncation_keeps_alignment(self, pio_client):
        tokens = ["tok"] * 50  # beyond the 32-token limit
        resp = pio_client.post("/score", json={"task": "pio", "sentences": [tokens]})
        body = resp.json()
        assert len(body["distributions"][0]) == 50
        assert any("truncated" in w for w in body["warnings"])

    def test_503_before_startup(self):
        app = create_app(BridgeConfig(task="relevance"))
        client = TestClient(app)  # no lifespan: model never loads
        resp = client.post("/score", json={"task": "relevance", "sentences": ["x"]})
        assert resp.status_code == 503

    def test_healthz(self, relevance_client):
        assert relevance_client.get("/healthz").json() == {"ready": True}
