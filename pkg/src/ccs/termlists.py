"""Term-list files: one term per line, optional trailing `` [MeSH]``
marker, ``#`` comments and blank lines ignored. The bundled defaults are
the pre-built intervention/outcome lists; users may point at their own
files instead."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import TermListUnavailable

MESH_SUFFIX = " [MeSH]"


def parse_term_list(text: str):
    from .query import Term  # local import to avoid a cycle

    terms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.endswith(MESH_SUFFIX):
            terms.append(Term(line[: -len(MESH_SUFFIX)].rstrip(), is_mesh=True))
        else:
            terms.append(Term(line))
    return terms


def load_term_list(path: str | Path):
    path = Path(path)
    if not path.is_file():
        raise TermListUnavailable(f"term list not found: {path}")
    return parse_term_list(path.read_text(encoding="utf-8"))


def _bundled(name: str):
    try:
        text = resources.files("ccs.data").joinpath(name).read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise TermListUnavailable(f"bundled term list missing: {name}") from exc
    return parse_term_list(text)


def default_interventions():
    return _bundled("default_interventions.txt")


def default_outcomes():
    return _bundled("default_outcomes.txt")
