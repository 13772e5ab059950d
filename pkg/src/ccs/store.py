"""Content store for queries, runs, trained models, and reports.

A plain directory tree (``CCS_DATA_DIR``, default ``./.ccs-data``):

    queries/<name>.json
    runs/<run_id>/bundle.json     deterministic result surfaces
    runs/<run_id>/record.json     timings and statuses
    models/<name>.npz
    reports/report-*.json

Every write is write-then-rename, so a crash mid-run leaves the store
readable; run ids are content-addressed, so re-running the same inputs
lands on the same key with identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .cache import atomic_write_json
from .errors import DuplicateName, UnknownQuery, UnknownRun
from .query import QuerySpec, validate_name

DEFAULT_DATA_DIR = ".ccs-data"


class ContentStore:
    def __init__(self, root: str | Path = DEFAULT_DATA_DIR):
        self.root = Path(root)
        self.queries_dir = self.root / "queries"
        self.runs_dir = self.root / "runs"
        self.models_dir = self.root / "models"
        self.reports_dir = self.root / "reports"

    # --- queries ---

    def _query_path(self, name: str) -> Path:
        return self.queries_dir / f"{validate_name(name)}.json"

    def save_query(self, spec: QuerySpec) -> None:
        path = self._query_path(spec.name)
        if path.exists():
            raise DuplicateName(f"query already exists: {spec.name}")
        atomic_write_json(path, spec.to_dict())

    def get_query(self, name: str) -> QuerySpec:
        path = self._query_path(name)
        if not path.is_file():
            raise UnknownQuery(f"no such query: {name}")
        return QuerySpec.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_queries(self) -> list[QuerySpec]:
        if not self.queries_dir.is_dir():
            return []
        specs = [
            QuerySpec.from_dict(json.loads(p.read_text(encoding="utf-8")))
            for p in sorted(self.queries_dir.glob("*.json"))
        ]
        specs.sort(key=lambda s: (s.created_at, s.name))
        return specs

    # --- runs ---

    def put_run(self, run_id: str, bundle: dict, record: dict) -> None:
        run_dir = self.runs_dir / run_id
        atomic_write_json(run_dir / "bundle.json", bundle)
        atomic_write_json(run_dir / "record.json", record)

    def _run_file(self, run_id: str, name: str) -> dict:
        path = self.runs_dir / run_id / name
        if not path.is_file():
            raise UnknownRun(f"no such run: {run_id}")
        return json.loads(path.read_text(encoding="utf-8"))

    def get_run_bundle(self, run_id: str) -> dict:
        return self._run_file(run_id, "bundle.json")

    def get_run_record(self, run_id: str) -> dict:
        return self._run_file(run_id, "record.json")

    def list_runs(self) -> list[str]:
        if not self.runs_dir.is_dir():
            return []
        return sorted(p.name for p in self.runs_dir.iterdir() if (p / "record.json").is_file())

    # --- models ---

    def model_path(self, name: str) -> Path:
        return self.models_dir / f"{name}.npz"
