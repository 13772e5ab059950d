"""Build advanced PubMed queries from structured inputs.

A disease name plus term groups compiles into a boolean tree that
renders to the advanced-query grammar. Run:

    python demos/01_query_building.py
"""

from ccs import Term, build_query
from ccs.query import query_string

# The simplest query: a bare disease name.
spec = build_query("glioma")
print("bare disease:")
print(" ", spec.rendered)

# Groups are ANDed together; empty groups vanish.
spec = build_query("glioma", interventions=[Term("temozolomide")])
print("\ndisease AND one intervention:")
print(" ", spec.rendered)

# Cancer mode applies stock synonyms and a synthesized MeSH heading,
# and the bundled intervention/outcome term lists fill empty groups.
spec = build_query("colorectal", cancer=True, use_default_terms=True)
print("\ncancer defaults (the worked colorectal example):")
print(" ", spec.rendered)

# The same query from fully explicit structured inputs.
explicit = build_query(
    "colorectal",
    synonyms=["neoplasm", "cancer", "tumour"],
    disease_mesh="Colorectal neoplasms",
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
)
assert explicit.rendered == spec.rendered
print("\nexplicit inputs render identically:", explicit.rendered == spec.rendered)

# Serialization round-trips byte-for-byte.
from ccs.query import QuerySpec

clone = QuerySpec.from_dict(explicit.to_dict())
print("round trip identical:", query_string(clone.root) == explicit.rendered)
