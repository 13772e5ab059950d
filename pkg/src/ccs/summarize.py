"""Extractive summaries from relevance results.

The k highest-scoring sentences (ties resolved toward earlier sentences)
form the summary; the summary score is the arithmetic mean of their
relevance scores. Selected sentences are emitted in document order for
readability, while ``selected`` keeps the relevance ranking for display.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyArticle, LengthMismatch
from .relevance import RelevanceResult
from .textproc import Sentence


@dataclass(frozen=True)
class Summary:
    pmid: str
    selected: list[tuple[int, float]]  # (sentence_index, score), ranked
    summary_text: str
    summary_score: float
    k: int


def summarize(
    results: list[RelevanceResult],
    sentences: list[Sentence],
    k: int = 4,
) -> Summary:
    """Build the top-k extractive summary.

    Ranking sorts by score descending with ties broken toward the smaller
    sentence index; when the article has fewer than k sentences all are
    taken and the mean runs over the actual count.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not sentences:
        raise EmptyArticle("no sentences to summarize")
    if len(results) != len(sentences):
        raise LengthMismatch("results and sentences must align")

    ranked = sorted(results, key=lambda r: (-r.score, r.sentence_index))
    chosen = ranked[: min(k, len(ranked))]
    selected = [(r.sentence_index, r.score) for r in chosen]
    by_index = {s.index: s for s in sentences}
    in_doc_order = sorted(idx for idx, _ in selected)
    text = " ".join(by_index[i].text for i in in_doc_order)
    score = sum(s for _, s in selected) / len(selected)
    return Summary(
        pmid=sentences[0].article_pmid,
        selected=selected,
        summary_text=text,
        summary_score=score,
        k=k,
    )


def batch_summaries(
    articles: list[tuple[str, str, str, Summary]],
    sort: str = "score",
) -> list[dict]:
    """Rows of (PMID, Title, Journal, Summary Score) for a set of scored
    articles. ``sort`` is "score" (descending, the default) or "pmid"
    (ascending numeric)."""
    rows = [
        {
            "pmid": pmid,
            "title": title,
            "journal": journal,
            "summary_score": summary.summary_score,
        }
        for pmid, title, journal, summary in articles
    ]
    if sort == "pmid":
        rows.sort(key=lambda r: int(r["pmid"]))
    elif sort == "score":
        rows.sort(key=lambda r: (-r["summary_score"], int(r["pmid"])))
    else:
        raise ValueError(f"unknown sort order: {sort!r}")
    return rows
