"""Advanced PubMed query construction.

A query is a small boolean tree over quoted terms (optionally tagged
``[MeSH]``) plus bare synonym words. Trees compile deterministically to
the advanced-query grammar PubMed accepts, e.g.::

    (("colorectal" AND (neoplasm OR cancer OR tumour))
      OR "Colorectal neoplasms" [MeSH])
    AND ("Adrenergic beta-antagonists" [MeSH] OR ... )

``build_query`` assembles the standard three-group shape
(disease AND interventions AND outcomes); ``render`` serializes any
node; ``query_string`` serializes a full query spec.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import EmptyDisease, InvalidQuery
from .termlists import default_interventions, default_outcomes

MAX_DEPTH = 8
NAME_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")

# Synonyms applied when the disease is flagged as a cancer. Kept in the
# spelling of the worked colorectal example so the generated string is
# reproducible character-for-character.
CANCER_SYNONYMS = ("neoplasm", "cancer", "tumour")


@dataclass(frozen=True)
class Term:
    """One search term. Quoted terms render as ``"text"``, MeSH terms as
    ``"text" [MeSH]``; synonym words render bare (unquoted)."""

    text: str
    is_mesh: bool = False
    quoted: bool = True

    def __post_init__(self):
        text = self.text.strip()
        if not text:
            raise InvalidQuery("term text must be non-empty")
        if '"' in text:
            raise InvalidQuery(f"term text may not contain double quotes: {text!r}")
        object.__setattr__(self, "text", text)

    def render(self) -> str:
        body = f'"{self.text}"' if self.quoted else self.text
        return f"{body} [MeSH]" if self.is_mesh else body


class QueryNode:
    """Base class; concrete variants are TermLeaf, And, Or."""

    def depth(self) -> int:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "QueryNode":
        kind = d.get("kind")
        if kind == "term":
            return TermLeaf(Term(d["text"], d.get("is_mesh", False), d.get("quoted", True)))
        if kind == "and":
            return And([QueryNode.from_dict(c) for c in d["children"]])
        if kind == "or":
            return Or([QueryNode.from_dict(c) for c in d["children"]])
        raise InvalidQuery(f"unknown query node kind: {kind!r}")


@dataclass(frozen=True)
class TermLeaf(QueryNode):
    term: Term

    def depth(self) -> int:
        return 1

    def to_dict(self) -> dict:
        return {
            "kind": "term",
            "text": self.term.text,
            "is_mesh": self.term.is_mesh,
            "quoted": self.term.quoted,
        }


class _Group(QueryNode):
    op: str

    def __init__(self, children: list[QueryNode]):
        children = list(children)
        if len(children) < 2:
            raise InvalidQuery(f"{self.op} groups need at least 2 children")
        self.children = children
        if self.depth() > MAX_DEPTH:
            raise InvalidQuery(f"query tree deeper than {MAX_DEPTH}")

    def depth(self) -> int:
        return 1 + max(c.depth() for c in self.children)

    def to_dict(self) -> dict:
        return {"kind": self.op.lower(), "children": [c.to_dict() for c in self.children]}

    def __eq__(self, other):
        return type(other) is type(self) and other.children == self.children


class And(_Group):
    op = "AND"


class Or(_Group):
    op = "OR"


def and_group(children: list[QueryNode]) -> QueryNode:
    """AND of the children; a single child collapses to itself."""
    return children[0] if len(children) == 1 else And(children)


def or_group(children: list[QueryNode]) -> QueryNode:
    return children[0] if len(children) == 1 else Or(children)


def render(node: QueryNode) -> str:
    """Serialize a node. Every AND/OR group is parenthesized; leaves are
    bare. Pure and deterministic: the same tree always yields the same
    string."""
    if isinstance(node, TermLeaf):
        return node.term.render()
    assert isinstance(node, _Group)
    joined = f" {node.op} ".join(render(c) for c in node.children)
    return f"({joined})"


def query_string(root: QueryNode) -> str:
    """Serialize a whole query. The top-level AND between groups is not
    wrapped in outer parentheses; leaf groups get their own pair so the
    group structure stays visible (``("X") AND ("a")``). A single-group
    query renders bare (``"glioma"``)."""
    if isinstance(root, And):
        parts = []
        for child in root.children:
            rendered = render(child)
            parts.append(rendered if isinstance(child, _Group) else f"({rendered})")
        return " AND ".join(parts)
    return render(root)


@dataclass
class QuerySpec:
    """A named, persisted query: the user-facing fields plus their
    deterministic compilation into a boolean tree."""

    name: str
    disease: str
    disease_synonyms: list[str]
    interventions: list[Term]
    outcomes: list[Term]
    root: QueryNode
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    @property
    def rendered(self) -> str:
        return query_string(self.root)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "disease": self.disease,
            "disease_synonyms": list(self.disease_synonyms),
            "interventions": [
                {"text": t.text, "is_mesh": t.is_mesh} for t in self.interventions
            ],
            "outcomes": [{"text": t.text, "is_mesh": t.is_mesh} for t in self.outcomes],
            "created_at": self.created_at,
            "root": self.root.to_dict(),
            "rendered": self.rendered,
        }

    @staticmethod
    def from_dict(d: dict) -> "QuerySpec":
        return QuerySpec(
            name=d["name"],
            disease=d["disease"],
            disease_synonyms=list(d.get("disease_synonyms", [])),
            interventions=[Term(t["text"], t.get("is_mesh", False)) for t in d.get("interventions", [])],
            outcomes=[Term(t["text"], t.get("is_mesh", False)) for t in d.get("outcomes", [])],
            root=QueryNode.from_dict(d["root"]),
            created_at=d["created_at"],
        )


def validate_name(name: str) -> str:
    if not NAME_RE.match(name):
        raise InvalidQuery(
            f"query name must match [A-Za-z0-9_-], max 64 chars: {name!r}"
        )
    return name


def _slugify(text: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9_-]+", "-", text.strip()).strip("-")
    return (slug or "query")[:64]


def _disease_group(disease: str, synonyms: list[str], mesh: str | None) -> QueryNode:
    head = TermLeaf(Term(disease))
    if not synonyms:
        return head
    syn_node = or_group([TermLeaf(Term(s, quoted=False)) for s in synonyms])
    combined = And([head, syn_node])
    if mesh:
        return Or([combined, TermLeaf(Term(mesh, is_mesh=True))])
    return combined


def build_query(
    disease: str,
    interventions: list[Term] | None = None,
    outcomes: list[Term] | None = None,
    synonyms: list[str] | None = None,
    *,
    name: str | None = None,
    disease_mesh: str | None = None,
    cancer: bool = False,
    use_default_terms: bool = False,
) -> QuerySpec:
    """Compile user inputs into a QuerySpec.

    The root takes the shape ``(disease-group) AND (intervention-group)
    AND (outcome-group)``; groups without terms are omitted together with
    their AND. When synonyms are present the disease group becomes
    ``(("head" AND (syn1 OR syn2 ...)) OR "mesh" [MeSH])``; the MeSH
    alternative appears when ``disease_mesh`` is given or synthesized in
    cancer mode as ``"<Disease> neoplasms"``.

    ``cancer=True`` applies the stock cancer synonym set and MeSH
    synthesis; ``use_default_terms=True`` substitutes the bundled
    intervention/outcome term lists when the respective argument is
    empty.
    """
    disease = (disease or "").strip()
    if not disease:
        raise EmptyDisease("disease name is required")

    synonyms = list(synonyms) if synonyms else []
    interventions = list(interventions) if interventions else []
    outcomes = list(outcomes) if outcomes else []

    if cancer:
        if not synonyms:
            synonyms = list(CANCER_SYNONYMS)
        if disease_mesh is None:
            disease_mesh = f"{disease[:1].upper()}{disease[1:]} neoplasms"
    if use_default_terms:
        if not interventions:
            interventions = default_interventions()
        if not outcomes:
            outcomes = default_outcomes()

    groups: list[QueryNode] = [_disease_group(disease, synonyms, disease_mesh)]
    if interventions:
        groups.append(or_group([TermLeaf(t) for t in interventions]))
    if outcomes:
        groups.append(or_group([TermLeaf(t) for t in outcomes]))

    return QuerySpec(
        name=validate_name(name if name is not None else _slugify(disease)),
        disease=disease,
        disease_synonyms=synonyms,
        interventions=interventions,
        outcomes=outcomes,
        root=and_group(groups),
    )
