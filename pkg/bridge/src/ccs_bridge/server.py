"""HTTP sidecar speaking the scorer wire protocol.

POST /score with {"task": "relevance", "sentences": [str, ...]} returns
{"scores": [...]}; {"task": "pio", "sentences": [[token, ...], ...]}
returns {"distributions": [...]}. Oversized inputs are truncated with a
"warnings" field in the response. 503 while the model is loading, 422 on
payload shape errors.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import BridgeConfig
from .model import BridgeModel


def _shape_error(message: str) -> JSONResponse:
    return JSONResponse({"code": "invalid_payload", "message": message}, status_code=422)


def create_app(config: BridgeConfig | None = None, model: BridgeModel | None = None) -> FastAPI:
    app = FastAPI(title="ccs-bridge", version="0.1.0")
    state = {"model": model, "config": config or BridgeConfig()}

    @app.on_event("startup")
    def load_model():
        if state["model"] is None:
            state["model"] = BridgeModel(state["config"])

    @app.get("/healthz")
    def healthz():
        return {"ready": state["model"] is not None}

    @app.post("/score")
    async def score(request: Request):
        if state["model"] is None:
            return JSONResponse(
                {"code": "loading", "message": "model is still loading"}, status_code=503
            )
        try:
            payload = await request.json()
        except Exception:
            return _shape_error("body must be JSON")
        if not isinstance(payload, dict):
            return _shape_error("body must be a JSON object")
        task = payload.get("task")
        sentences = payload.get("sentences")
        if task not in ("relevance", "pio"):
            return _shape_error(f"unknown task: {task!r}")
        if not isinstance(sentences, list):
            return _shape_error("sentences must be a list")

        model: BridgeModel = state["model"]
        if task == "relevance":
            if not all(isinstance(s, str) for s in sentences):
                return _shape_error("relevance sentences must be strings")
            if model.config.task != "relevance":
                return _shape_error("this bridge serves the pio task")
            scores, warnings = model.score_relevance(sentences)
            body = {"scores": scores}
        else:
            if not all(
                isinstance(s, list) and all(isinstance(t, str) for t in s)
                for s in sentences
            ):
                return _shape_error("pio sentences must be lists of token strings")
            if model.config.task != "pio":
                return _shape_error("this bridge serves the relevance task")
            dists, warnings = model.score_pio(sentences)
            body = {"distributions": dists}
        if warnings:
            body["warnings"] = warnings
        return JSONResponse(body)

    return app
