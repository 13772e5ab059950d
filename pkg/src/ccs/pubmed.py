"""NCBI E-utilities client: ESearch for PMIDs, EFetch for article XML.

All HTTP goes through an injectable transport so tests replay recorded
fixtures and offline mode can refuse to dial at all. Fetched article XML
is cached one file per PMID; search results are cached keyed by
(rendered query, cap). Transient failures (timeouts, 5xx, 429) are
retried up to 3 times with 0.5s/1s/2s backoff.
"""

from __future__ import annotations

import json
import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone

import requests

from .cache import ArticleCache, sha256_hex
from .errors import (
    MalformedResponse,
    NetworkError,
    OfflineViolation,
    QuotaExceeded,
    UnknownPmid,
)
from .ratelimit import RateLimiter

ESEARCH_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi"
EFETCH_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi"

FETCH_BATCH_SIZE = 200
DEFAULT_TIMEOUT = 30.0
RETRY_BACKOFF = (0.5, 1.0, 2.0)

PMID_RE = re.compile(r"^[1-9][0-9]{0,7}$")


@dataclass(frozen=True)
class NcbiCredentials:
    email: str
    api_key: str | None = None

    def __post_init__(self):
        if not self.email.strip():
            raise ValueError("NCBI requires a contact email")
        if self.api_key is not None and not self.api_key.strip():
            raise ValueError("api_key, when given, must be non-empty")

    @staticmethod
    def from_env(env) -> "NcbiCredentials":
        email = env.get("NCBI_EMAIL", "").strip()
        key = env.get("NCBI_API_KEY", "").strip() or None
        if not email:
            raise ValueError("set NCBI_EMAIL (and optionally NCBI_API_KEY)")
        return NcbiCredentials(email=email, api_key=key)


@dataclass
class PmidList:
    query_name: str
    pmids: list[str]
    total_count: int
    retrieved_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def __post_init__(self):
        seen = set()
        for pmid in self.pmids:
            validate_pmid(pmid)
            if pmid in seen:
                raise MalformedResponse(f"duplicate PMID in result: {pmid}")
            seen.add(pmid)
        if len(self.pmids) > self.total_count:
            raise MalformedResponse("more PMIDs than the reported hit count")


@dataclass(frozen=True)
class RawArticle:
    pmid: str
    title: str
    journal: str
    abstract_text: str
    source_xml_digest: str
    fetched_at: str

    @property
    def has_abstract(self) -> bool:
        return bool(self.abstract_text.strip())


def validate_pmid(pmid: str) -> str:
    if not PMID_RE.match(pmid):
        raise UnknownPmid(f"not a valid PMID: {pmid!r}")
    return pmid


def requests_transport(url: str, params: dict, timeout: float):
    """Default transport: returns (status_code, body_bytes). Timeouts and
    connection failures surface as NetworkError for the retry loop."""
    try:
        resp = requests.get(url, params=params, timeout=timeout)
    except requests.Timeout as exc:
        raise NetworkError(f"timeout talking to {url}") from exc
    except requests.RequestException as exc:
        raise NetworkError(f"connection failure talking to {url}: {exc}") from exc
    return resp.status_code, resp.content


def offline_transport(url: str, params: dict, timeout: float):
    raise OfflineViolation(f"offline mode but a network call was attempted: {url}")


class PubMedClient:
    def __init__(
        self,
        credentials: NcbiCredentials,
        cache: ArticleCache | None = None,
        limiter: RateLimiter | None = None,
        transport=requests_transport,
        timeout: float = DEFAULT_TIMEOUT,
        sleep=time.sleep,
    ):
        self.credentials = credentials
        self.cache = cache or ArticleCache()
        self.limiter = limiter or RateLimiter.for_credentials(credentials)
        self.transport = transport
        self.timeout = timeout
        self._sleep = sleep

    # --- plumbing ---

    def _base_params(self) -> dict:
        params = {"db": "pubmed", "email": self.credentials.email}
        if self.credentials.api_key:
            params["api_key"] = self.credentials.api_key
        return params

    def _request(self, url: str, params: dict) -> bytes:
        last_status = None
        for attempt in range(len(RETRY_BACKOFF) + 1):
            if attempt:
                self._sleep(RETRY_BACKOFF[attempt - 1])
            self.limiter.acquire()
            try:
                status, body = self.transport(url, params, self.timeout)
            except NetworkError:
                if attempt == len(RETRY_BACKOFF):
                    raise
                continue
            if status == 200:
                return body
            last_status = status
            if status == 429 or status >= 500:
                continue
            raise NetworkError(f"HTTP {status} from {url}")
        if last_status == 429:
            raise QuotaExceeded("HTTP 429 persisted through retries")
        raise NetworkError(
            f"gave up after {len(RETRY_BACKOFF)} retries"
            + (f" (last HTTP {last_status})" if last_status else "")
        )

    # --- operations ---

    def search(self, spec, cap: int = 100) -> PmidList:
        """Resolve a query to PMIDs in PubMed's returned order. ``spec``
        is a QuerySpec or an already-rendered query string."""
        if not 1 <= cap <= 10000:
            raise ValueError("cap must be in [1, 10000]")
        rendered = spec if isinstance(spec, str) else spec.rendered
        name = "" if isinstance(spec, str) else spec.name

        cached = self.cache.get_search(rendered, cap)
        if cached is not None:
            return PmidList(
                query_name=cached.get("query_name", name),
                pmids=list(cached["pmids"]),
                total_count=int(cached["total_count"]),
                retrieved_at=cached.get("retrieved_at", ""),
            )

        params = self._base_params() | {"retmode": "json", "term": rendered, "retmax": cap}
        body = self._request(ESEARCH_URL, params)
        try:
            payload = json.loads(body)
            result = payload["esearchresult"]
            pmids = [str(p) for p in result["idlist"]][:cap]
            total = int(result["count"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedResponse(f"unparseable ESearch response: {exc}") from exc

        out = PmidList(query_name=name, pmids=pmids, total_count=total)
        self.cache.put_search(
            rendered,
            cap,
            {
                "query_name": name,
                "rendered_query": rendered,
                "cap": cap,
                "pmids": out.pmids,
                "total_count": out.total_count,
                "retrieved_at": out.retrieved_at,
            },
        )
        return out

    def fetch(self, pmids: list[str]) -> list[RawArticle]:
        """Fetch articles for the given PMIDs, cache-first, preserving
        input order. PMIDs missing from the server response are skipped
        (callers diff the returned set); the batch itself never fails on
        them."""
        if not pmids:
            raise ValueError("fetch requires at least one PMID")
        for pmid in pmids:
            validate_pmid(pmid)

        by_pmid: dict[str, RawArticle] = {}
        missing: list[str] = []
        for pmid in pmids:
            xml = self.cache.get_article_xml(pmid)
            if xml is not None:
                by_pmid[pmid] = self._article_from_xml(pmid, xml)
            else:
                missing.append(pmid)

        for i in range(0, len(missing), FETCH_BATCH_SIZE):
            batch = missing[i : i + FETCH_BATCH_SIZE]
            params = self._base_params() | {"retmode": "xml", "id": ",".join(batch)}
            body = self._request(EFETCH_URL, params)
            for pmid, xml in self._split_article_set(body).items():
                if pmid in by_pmid or pmid not in set(batch):
                    continue
                self.cache.put_article_xml(pmid, xml)
                by_pmid[pmid] = self._article_from_xml(pmid, xml)

        return [by_pmid[p] for p in pmids if p in by_pmid]

    # --- XML handling ---

    @staticmethod
    def _split_article_set(body: bytes) -> dict[str, bytes]:
        """Break a PubmedArticleSet into per-article XML documents keyed
        by PMID; re-serialization is deterministic so cached bytes are
        stable."""
        try:
            root = ET.fromstring(body)
        except ET.ParseError as exc:
            raise MalformedResponse(f"unparseable EFetch XML: {exc}") from exc
        out: dict[str, bytes] = {}
        for article in root.iter("PubmedArticle"):
            pmid_el = article.find("./MedlineCitation/PMID")
            if pmid_el is None or not (pmid_el.text or "").strip():
                continue
            out[pmid_el.text.strip()] = ET.tostring(article, encoding="utf-8")
        return out

    @staticmethod
    def _article_from_xml(pmid: str, xml: bytes) -> RawArticle:
        try:
            article = ET.fromstring(xml)
        except ET.ParseError as exc:
            raise MalformedResponse(f"corrupt cached XML for {pmid}: {exc}") from exc
        found = article.find("./MedlineCitation/PMID")
        got = (found.text or "").strip() if found is not None else ""
        if got != pmid:
            raise MalformedResponse(f"article XML is for PMID {got!r}, wanted {pmid}")

        title_el = article.find(".//ArticleTitle")
        title = "".join(title_el.itertext()).strip() if title_el is not None else ""
        journal_el = article.find(".//Journal/Title")
        journal = (journal_el.text or "").strip() if journal_el is not None else ""
        # Abstract sections in document order, joined by single spaces.
        sections = [
            " ".join("".join(el.itertext()).split())
            for el in article.findall(".//Abstract/AbstractText")
        ]
        abstract = " ".join(s for s in sections if s)

        return RawArticle(
            pmid=pmid,
            title=title,
            journal=journal,
            abstract_text=abstract,
            source_xml_digest=sha256_hex(xml),
            fetched_at=datetime.now(timezone.utc).isoformat(),
        )
