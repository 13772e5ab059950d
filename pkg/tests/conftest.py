import json
from pathlib import Path

import pytest

from ccs.cache import ArticleCache
from ccs.pubmed import NcbiCredentials, PubMedClient
from ccs.query import Term, build_query
from ccs.ratelimit import RateLimiter

FIXTURES = Path(__file__).parent / "fixtures"

GOLDEN_QUERY = (
    '(("colorectal" AND (neoplasm OR cancer OR tumour)) OR "Colorectal neoplasms" [MeSH])'
    ' AND ("Adrenergic beta-antagonists" [MeSH] OR "Antihypertensive Agents" [MeSH]'
    ' OR "beta-blockers") AND ("Cancer Survivors" [MeSH] OR "cancer survivorship"'
    ' OR "cancer survivors" OR "cancer survival")'
)

FIXTURE_PMIDS = [
    "35881046", "35725814", "34843550", "31062847", "30917783", "29858097",
    "29846174", "24050955", "23255459", "21453301", "19213999",
]


class FakeClock:
    """Monotonic clock + sleep pair for simulating waits."""

    def __init__(self):
        self.now = 0.0

    def clock(self):
        return self.now

    def sleep(self, seconds):
        self.now += seconds


class ReplayTransport:
    """Transport stub serving recorded (or scripted) responses and
    counting every call; raises if asked for something unscripted."""

    def __init__(self):
        self.calls = []
        self.esearch_body: bytes | None = None
        self.efetch_body: bytes | None = None
        self.script: list[tuple[int, bytes]] = []  # overrides, popped first

    def __call__(self, url, params, timeout):
        self.calls.append((url, dict(params)))
        if self.script:
            return self.script.pop(0)
        if "esearch" in url and self.esearch_body is not None:
            return 200, self.esearch_body
        if "efetch" in url and self.efetch_body is not None:
            return 200, self.efetch_body
        raise AssertionError(f"unscripted request: {url}")


def golden_query_spec(name="colorectal-bb"):
    return build_query(
        "colorectal",
        interventions=[
            Term("Adrenergic beta-antagonists", is_mesh=True),
            Term("Antihypertensive Agents", is_mesh=True),
            Term("beta-blockers"),
        ],
        outcomes=[
            Term("Cancer Survivors", is_mesh=True),
            Term("cancer survivorship"),
            Term("cancer survivors"),
            Term("cancer survival"),
        ],
        synonyms=["neoplasm", "cancer", "tumour"],
        disease_mesh="Colorectal neoplasms",
        name=name,
    )


@pytest.fixture
def fake_clock():
    return FakeClock()


@pytest.fixture
def replay_transport():
    transport = ReplayTransport()
    transport.esearch_body = (FIXTURES / "esearch_colorectal.json").read_bytes()
    transport.efetch_body = (FIXTURES / "efetch_colorectal.xml").read_bytes()
    return transport


@pytest.fixture
def replay_client(tmp_path, replay_transport, fake_clock):
    cache = ArticleCache(tmp_path / "cache")
    limiter = RateLimiter(1000.0, clock=fake_clock.clock, sleep=fake_clock.sleep)
    return PubMedClient(
        NcbiCredentials("tests@example.org", api_key="k"),
        cache=cache,
        limiter=limiter,
        transport=replay_transport,
        sleep=fake_clock.sleep,
    )


def seed_cache_from_fixtures(cache_dir, cap=100, query=None):
    """Populate an article cache exactly as a prior online run would
    have: one XML file per fixture PMID plus the search index entry."""
    cache = ArticleCache(cache_dir)
    body = (FIXTURES / "efetch_colorectal.xml").read_bytes()
    for pmid, xml in PubMedClient._split_article_set(body).items():
        cache.put_article_xml(pmid, xml)
    payload = json.loads((FIXTURES / "esearch_colorectal.json").read_text())
    rendered = query if query is not None else GOLDEN_QUERY
    cache.put_search(
        rendered,
        cap,
        {
            "query_name": "colorectal-bb",
            "rendered_query": rendered,
            "cap": cap,
            "pmids": payload["esearchresult"]["idlist"],
            "total_count": int(payload["esearchresult"]["count"]),
            "retrieved_at": "2026-01-01T00:00:00+00:00",
        },
    )
    return cache


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    wanted = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    lines = []
    for status, tag in wanted.items():
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid and rep.when in ("call", "setup"):
                name = nodeid.split("::")[-1]
                lines.append(f"{tag}: {name}")
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
