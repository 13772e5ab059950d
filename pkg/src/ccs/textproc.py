"""Sentence segmentation and tokenization with offset provenance.

Everything here is pure and rule-based so that dataset loaders, scorers,
and the service all see identical unit boundaries. Offsets are byte
offsets into the UTF-8 encoding of the source string and always fall on
character boundaries; sentence text is stored trimmed while its offsets
cover the untrimmed span.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import OverlapViolation

_OPENERS = "([{"
_CLOSERS = ")]}"
_TERMINALS = ".!?"

# Punctuation detached from token edges. Hyphen is deliberately absent so
# "beta-blockers" stays one token; % stays attached to numbers.
_DETACH = set("()[]{}.,;:!?\"'")


@dataclass(frozen=True)
class Sentence:
    """One sentence of an abstract. ``char_start``/``char_end`` are
    half-open UTF-8 byte offsets into the abstract text; ``text`` is the
    stripped content of that span."""

    article_pmid: str
    index: int
    text: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Token:
    """One token; offsets are UTF-8 byte offsets relative to the
    (trimmed) sentence text."""

    sentence_index: int
    index: int
    text: str
    char_start: int
    char_end: int


def byte_offsets(text: str) -> list[int]:
    """Cumulative UTF-8 byte offset for each character position,
    length ``len(text) + 1``."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def byte_slice(text: str, start: int, end: int) -> str:
    """Slice ``text`` by UTF-8 byte offsets."""
    return text.encode("utf-8")[start:end].decode("utf-8")


def _load_abbreviations() -> tuple[str, ...]:
    text = resources.files("ccs.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = [
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    ]
    return tuple(entries)


_DEFAULT_ABBREVIATIONS = _load_abbreviations()


def load_abbreviations(path: str | Path) -> tuple[str, ...]:
    """Read an extra abbreviation stop-list (one entry per line)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return tuple(
        line.strip().lower() for line in lines if line.strip() and not line.startswith("#")
    )


def _ends_with_abbreviation(text: str, dot_index: int, abbreviations) -> bool:
    prefix = text[: dot_index + 1].lower()
    for abbr in abbreviations:
        if prefix.endswith(abbr):
            head = len(prefix) - len(abbr)
            if head == 0 or not prefix[head - 1].isalnum():
                return True
    return False


def segment(
    text: str,
    pmid: str = "",
    abbreviations: tuple[str, ...] | None = None,
) -> list[Sentence]:
    """Split text into sentences.

    A boundary is a ``.``, ``!`` or ``?`` at bracket depth zero followed
    by whitespace and then an uppercase letter or digit; periods ending a
    stop-listed abbreviation never split, and neither does anything
    inside parentheses/brackets (which also covers decimal points, since
    those are not followed by whitespace). Empty candidates are dropped.
    """
    if abbreviations is None:
        abbreviations = _DEFAULT_ABBREVIATIONS
    n = len(text)
    spans: list[tuple[int, int]] = []
    start: int | None = None
    depth = 0
    for i, ch in enumerate(text):
        if start is None:
            if ch.isspace():
                continue
            start = i
            depth = 0
        if ch in _OPENERS:
            depth += 1
        elif ch in _CLOSERS:
            depth = max(0, depth - 1)
        elif ch in _TERMINALS and depth == 0:
            j = i + 1
            if j < n and text[j].isspace():
                k = j
                while k < n and text[k].isspace():
                    k += 1
                if k < n and (text[k].isupper() or text[k].isdigit()):
                    if ch != "." or not _ends_with_abbreviation(text, i, abbreviations):
                        spans.append((start, i + 1))
                        start = None
    if start is not None:
        spans.append((start, n))

    to_bytes = byte_offsets(text)
    sentences = []
    for cs, ce in spans:
        stripped = text[cs:ce].strip()
        if not stripped:
            continue
        sentences.append(
            Sentence(
                article_pmid=pmid,
                index=len(sentences),
                text=stripped,
                char_start=to_bytes[cs],
                char_end=to_bytes[ce],
            )
        )
    return sentences


def tokenize(sentence: Sentence | str) -> list[Token]:
    """Whitespace-split, then detach leading/trailing punctuation as
    separate tokens. Hyphenated and internally punctuated words stay
    single tokens ("beta-blockers", "n=120")."""
    if isinstance(sentence, Sentence):
        text = sentence.text
        sentence_index = sentence.index
    else:
        text = sentence
        sentence_index = 0

    pieces: list[tuple[int, int]] = []  # char spans of raw whitespace chunks
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                pieces.append((start, i))
                start = None
        elif start is None:
            start = i
    if start is not None:
        pieces.append((start, len(text)))

    to_bytes = byte_offsets(text)
    tokens: list[Token] = []

    def emit(cs: int, ce: int):
        tokens.append(
            Token(
                sentence_index=sentence_index,
                index=len(tokens),
                text=text[cs:ce],
                char_start=to_bytes[cs],
                char_end=to_bytes[ce],
            )
        )

    for cs, ce in pieces:
        lo, hi = cs, ce
        leading: list[tuple[int, int]] = []
        trailing: list[tuple[int, int]] = []
        while lo < hi and text[lo] in _DETACH:
            leading.append((lo, lo + 1))
            lo += 1
        while hi > lo and text[hi - 1] in _DETACH:
            trailing.append((hi - 1, hi))
            hi -= 1
        for span in leading:
            emit(*span)
        if hi > lo:
            emit(lo, hi)
        for span in reversed(trailing):
            emit(*span)
    return tokens


def align_subword_labels(
    tokens: list[Token],
    subword_spans: list[tuple[int, int, np.ndarray]],
    n_labels: int = 4,
) -> list[np.ndarray]:
    """Map subword-level label distributions back onto whole tokens.

    Each token takes the distribution of the first subword overlapping it
    (byte overlap >= 1); tokens no subword touches get the point
    distribution on the None label (last index). Subword spans must not
    overlap each other.
    """
    spans = sorted(subword_spans, key=lambda s: (s[0], s[1]))
    for (a_start, a_end, _), (b_start, _b_end, _) in zip(spans, spans[1:]):
        if b_start < a_end:
            raise OverlapViolation(
                f"subword spans overlap: ends at {a_end}, next starts at {b_start}"
            )
    none_dist = np.zeros(n_labels)
    none_dist[-1] = 1.0

    out = []
    for tok in tokens:
        hit = None
        for s_start, s_end, dist in spans:
            if s_start < tok.char_end and s_end > tok.char_start:
                hit = np.asarray(dist, dtype=float)
                break
            if s_start >= tok.char_end:
                break
        out.append(hit if hit is not None else none_dist.copy())
    return out
