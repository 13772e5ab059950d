"""Runtime configuration: defaults < environment < config file.

Environment variables: ``CCS_DATA_DIR``, ``CCS_CACHE_DIR``,
``NCBI_EMAIL``, ``NCBI_API_KEY``, ``CCS_BRIDGE_URL``. A plain
``key=value`` config file (path in ``CCS_CONFIG``, else ``./ccs.conf``
if present) overrides the environment, using the same keys
case-insensitively."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

CONFIG_KEYS = ("CCS_DATA_DIR", "CCS_CACHE_DIR", "NCBI_EMAIL", "NCBI_API_KEY", "CCS_BRIDGE_URL")


def _parse_config_file(path: Path) -> dict:
    values = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key.strip().upper()] = value.strip()
    return values


@dataclass
class Settings:
    data_dir: Path
    cache_dir: Path
    ncbi_email: str | None = None
    ncbi_api_key: str | None = None
    bridge_url: str | None = None

    @classmethod
    def resolve(cls, env=None, config_path: str | Path | None = None) -> "Settings":
        env = dict(os.environ if env is None else env)
        merged = {k: env.get(k) for k in CONFIG_KEYS}
        candidate = config_path or env.get("CCS_CONFIG") or "ccs.conf"
        candidate = Path(candidate)
        if candidate.is_file():
            merged.update(_parse_config_file(candidate))
        return cls(
            data_dir=Path(merged.get("CCS_DATA_DIR") or ".ccs-data"),
            cache_dir=Path(merged.get("CCS_CACHE_DIR") or ".ccs-cache"),
            ncbi_email=merged.get("NCBI_EMAIL") or None,
            ncbi_api_key=merged.get("NCBI_API_KEY") or None,
            bridge_url=merged.get("CCS_BRIDGE_URL") or None,
        )
