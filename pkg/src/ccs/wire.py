"""Scorer wire protocol shared with any external model sidecar.

One endpoint, ``POST /score``, JSON both ways:

    {"task": "relevance", "sentences": ["...", ...]}
        -> {"scores": [0.42, ...]}                  (same length/order)
    {"task": "pio", "sentences": [["tok", ...], ...]}
        -> {"distributions": [[[p,i,o,none], ...], ...]}  (aligned to tokens)

Validation here is shared by the in-process client and the test suite;
shape errors raise MalformedResponse, transport errors ScorerUnavailable.
"""

from __future__ import annotations

import json

import requests

from .errors import MalformedResponse, ScorerUnavailable

DIST_SUM_TOLERANCE = 1e-6


def validate_relevance_response(payload: dict, n_sentences: int) -> list[float]:
    scores = payload.get("scores")
    if not isinstance(scores, list) or len(scores) != n_sentences:
        raise MalformedResponse(
            f"expected {n_sentences} scores, got {scores!r:.80s}"
        )
    out = []
    for s in scores:
        if not isinstance(s, (int, float)) or not 0.0 <= float(s) <= 1.0:
            raise MalformedResponse(f"score out of [0,1]: {s!r}")
        out.append(float(s))
    return out


def validate_pio_response(payload: dict, token_counts: list[int]) -> list[list[list[float]]]:
    dists = payload.get("distributions")
    if not isinstance(dists, list) or len(dists) != len(token_counts):
        raise MalformedResponse("distribution count does not match sentence count")
    for per_sentence, expected in zip(dists, token_counts):
        if not isinstance(per_sentence, list) or len(per_sentence) != expected:
            raise MalformedResponse("token count mismatch in distributions")
        for dist in per_sentence:
            if not isinstance(dist, list) or len(dist) != 4:
                raise MalformedResponse("each distribution must have 4 entries")
            if any(d < 0 for d in dist):
                raise MalformedResponse("negative probability in distribution")
            if abs(sum(dist) - 1.0) > DIST_SUM_TOLERANCE:
                raise MalformedResponse(f"distribution sums to {sum(dist)}")
    return dists


def requests_post_json(url: str, payload: dict, timeout: float):
    try:
        resp = requests.post(url, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise ScorerUnavailable(f"scorer bridge unreachable at {url}: {exc}") from exc
    if resp.status_code != 200:
        raise ScorerUnavailable(f"scorer bridge returned HTTP {resp.status_code}")
    try:
        return resp.json()
    except json.JSONDecodeError as exc:
        raise ScorerUnavailable("scorer bridge returned non-JSON body") from exc


class BridgeClient:
    """JSON-over-HTTP client for a /score sidecar."""

    def __init__(self, base_url: str, post=requests_post_json, timeout: float = 30.0):
        self.url = base_url.rstrip("/") + "/score"
        self._post = post
        self.timeout = timeout

    def score_relevance(self, texts: list[str]) -> list[float]:
        payload = {"task": "relevance", "sentences": list(texts)}
        return validate_relevance_response(
            self._post(self.url, payload, self.timeout), len(texts)
        )

    def score_pio(self, token_lists: list[list[str]]) -> list[list[list[float]]]:
        payload = {"task": "pio", "sentences": [list(t) for t in token_lists]}
        return validate_pio_response(
            self._post(self.url, payload, self.timeout),
            [len(t) for t in token_lists],
        )
