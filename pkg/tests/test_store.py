import json
import threading

import pytest

from ccs.cache import ArticleCache, atomic_write_json
from ccs.errors import DuplicateName, UnknownQuery, UnknownRun
from ccs.query import build_query
from ccs.store import ContentStore

from conftest import golden_query_spec


class TestQueryStore:
    def test_round_trip_renders_identically(self, tmp_path):
        store = ContentStore(tmp_path)
        spec = golden_query_spec()
        store.save_query(spec)
        loaded = store.get_query(spec.name)
        assert loaded.rendered == spec.rendered

    def test_duplicate_name(self, tmp_path):
        store = ContentStore(tmp_path)
        store.save_query(golden_query_spec())
        with pytest.raises(DuplicateName):
            store.save_query(golden_query_spec())

    def test_unknown_query(self, tmp_path):
        with pytest.raises(UnknownQuery):
            ContentStore(tmp_path).get_query("missing")

    def test_list_sorted_by_created_at(self, tmp_path):
        store = ContentStore(tmp_path)
        specs = []
        for i, name in enumerate(["q-c", "q-a", "q-b"]):
            spec = build_query(f"disease{i}", name=name)
            spec.created_at = f"2026-01-0{i + 1}T00:00:00+00:00"
            specs.append(spec)
            store.save_query(spec)
        assert [s.name for s in store.list_queries()] == ["q-c", "q-a", "q-b"]

    def test_list_empty(self, tmp_path):
        assert ContentStore(tmp_path).list_queries() == []


class TestRunStore:
    def test_round_trip(self, tmp_path):
        store = ContentStore(tmp_path)
        bundle = {"run_id": "abc123", "summaries": [{"pmid": "1"}]}
        record = {"run_id": "abc123", "wall_time_seconds": 1.5}
        store.put_run("abc123", bundle, record)
        assert store.get_run_bundle("abc123") == bundle
        assert store.get_run_record("abc123") == record
        assert store.list_runs() == ["abc123"]

    def test_unknown_run(self, tmp_path):
        with pytest.raises(UnknownRun):
            ContentStore(tmp_path).get_run_bundle("nope")


class TestAtomicWrites:
    def test_no_partial_files_visible(self, tmp_path):
        target = tmp_path / "out.json"
        errors = []

        def writer(n):
            try:
                for i in range(20):
                    atomic_write_json(target, {"writer": n, "i": i, "pad": "x" * 2000})
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=writer, args=(n,)) for n in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        parsed = json.loads(target.read_text())
        assert parsed["pad"] == "x" * 2000
        assert not list(tmp_path.glob(".tmp-*"))

    def test_cache_article_round_trip(self, tmp_path):
        cache = ArticleCache(tmp_path)
        digest = cache.put_article_xml("123", b"<PubmedArticle/>")
        assert cache.get_article_xml("123") == b"<PubmedArticle/>"
        assert len(digest) == 64
        assert cache.get_article_xml("456") is None

    def test_search_key_distinguishes_cap(self, tmp_path):
        cache = ArticleCache(tmp_path)
        assert cache.search_key("q", 5) != cache.search_key("q", 6)
        assert cache.search_key("q1", 5) != cache.search_key("q2", 5)
