"""On-disk cache for harvested PubMed content.

Layout under the cache root (``CCS_CACHE_DIR``, default ``./.ccs-cache``):

    articles/<pmid>.xml     one file per PMID, the raw per-article XML
    searches/<key>.json     search result index keyed by (query, cap)

Writes go through a temp file and ``os.replace`` so concurrent writers
cannot leave a torn entry; content digests let callers verify integrity.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

DEFAULT_CACHE_DIR = ".ccs-cache"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: Path, obj) -> None:
    atomic_write_bytes(path, json.dumps(obj, indent=2, sort_keys=True).encode("utf-8"))


class ArticleCache:
    def __init__(self, root: str | Path = DEFAULT_CACHE_DIR):
        self.root = Path(root)
        self.articles_dir = self.root / "articles"
        self.searches_dir = self.root / "searches"

    # --- per-article XML ---

    def article_path(self, pmid: str) -> Path:
        return self.articles_dir / f"{pmid}.xml"

    def get_article_xml(self, pmid: str) -> bytes | None:
        path = self.article_path(pmid)
        if not path.is_file():
            return None
        return path.read_bytes()

    def put_article_xml(self, pmid: str, xml: bytes) -> str:
        atomic_write_bytes(self.article_path(pmid), xml)
        return sha256_hex(xml)

    # --- search result index ---

    @staticmethod
    def search_key(rendered_query: str, cap: int) -> str:
        return sha256_hex(f"{cap}\n{rendered_query}".encode("utf-8"))[:24]

    def get_search(self, rendered_query: str, cap: int) -> dict | None:
        path = self.searches_dir / f"{self.search_key(rendered_query, cap)}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put_search(self, rendered_query: str, cap: int, entry: dict) -> None:
        path = self.searches_dir / f"{self.search_key(rendered_query, cap)}.json"
        atomic_write_json(path, entry)
