"""Lexical TF-IDF retrieval over clause nodes.

Serves as the entry-point finder for the crawler and as the flat
"similar chunks" baseline it is compared against.  Chunks are clause nodes.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .graph import KnowledgeGraph

# Pinned: keyword-overlap scores depend on this exact list.
STOPWORDS = frozenset(
    """
    a about above after again against all also am an and any are as at
    be because been before being below between both but by
    can could did do does doing down during each either
    few for from further had has have having he her here hers herself him himself his how
    i if in into is it its itself just may me more most my myself
    no nor not now of off on once only or other our ours ourselves out over own
    same shall she should so some such than that the their theirs them themselves then
    there these they this those through to too under until up upon very
    was we were what when where which while who whom why will with would
    you your yours yourself yourselves
    """.split()
)

_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords and 1-char tokens.

    >>> tokenize("Grade 40 Concrete (High Strength)")
    ['grade', '40', 'concrete', 'high', 'strength']
    """
    return [t for t in _SPLIT_RE.split(text.lower()) if len(t) > 1 and t not in STOPWORDS]


@dataclass(frozen=True)
class TermVector:
    weights: dict[str, float]
    norm: float = field(default=-1.0)

    def __post_init__(self):
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("term weights must be non-negative")
        cleaned = {t: w for t, w in self.weights.items() if w != 0}
        object.__setattr__(self, "weights", cleaned)
        object.__setattr__(self, "norm", math.sqrt(sum(w * w for w in cleaned.values())))

    def scaled(self, c: float) -> "TermVector":
        return TermVector({t: c * w for t, w in self.weights.items()})


def cosine(a: TermVector, b: TermVector) -> float:
    """dot(a, b) / (|a| |b|), or 0 when either vector is empty."""
    if a.norm == 0 or b.norm == 0:
        return 0.0
    small, large = (a, b) if len(a.weights) <= len(b.weights) else (b, a)
    dot = math.fsum(w * large.weights.get(t, 0.0) for t, w in small.weights.items())
    return min(1.0, max(0.0, dot / (a.norm * b.norm)))


@dataclass(frozen=True)
class RankedHit:
    node: str
    score: float


@dataclass
class LexicalIndex:
    vectors: dict[str, TermVector] = field(default_factory=dict)
    doc_freq: Counter = field(default_factory=Counter)
    node_count: int = 0

    def idf(self, term: str) -> float:
        df = self.doc_freq.get(term, 0)
        return math.log(1 + self.node_count / df) if df else 0.0

    def vectorize(self, text: str) -> TermVector:
        counts = Counter(tokenize(text))
        return TermVector({t: n * self.idf(t) for t, n in counts.items() if t in self.doc_freq})

    def __len__(self) -> int:
        return self.node_count


def build_index(graph: KnowledgeGraph) -> LexicalIndex:
    """Index the corpus as written: one chunk per clause block.

    Superseded clauses stay in the index.  Clauses the graph derived from
    amendment instructions are not chunks of their own; their text is
    already inside the amending block.  Weights are raw term count times
    ln(1 + N/df).
    """
    counts = {
        node_id: Counter(tokenize(node.content))
        for node_id, node in sorted(graph.nodes.items())
        if graph.is_source_clause(node_id)
    }
    index = LexicalIndex(node_count=len(counts))
    for c in counts.values():
        index.doc_freq.update(c.keys())
    for node_id, c in counts.items():
        index.vectors[node_id] = TermVector({t: n * index.idf(t) for t, n in c.items()})
    return index


def top_k(index: LexicalIndex, query: str, k: int = 3) -> list[RankedHit]:
    """Highest-cosine nodes for ``query``; ties go to the smaller node id.

    A query with no indexed terms returns ``[]``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    q = index.vectorize(query)
    if q.norm == 0:
        return []
    hits = [RankedHit(node_id, cosine(q, v)) for node_id, v in index.vectors.items()]
    hits.sort(key=lambda h: (-h.score, h.node))
    return hits[:k]


def select_entry(graph: KnowledgeGraph, index: LexicalIndex, query: str) -> str | None:
    """Entry node for a graph query: the lexical top-1 clause.

    When that clause is an amendment instruction, the entry moves to the
    clause it introduces that best matches the query.
    """
    hits = top_k(index, query, k=1)
    if not hits:
        return None
    entry = hits[0].node
    children = graph.introduced_clauses(entry)
    if children:
        q = index.vectorize(query)
        entry = min(children, key=lambda c: (-cosine(q, index.vectorize(graph.nodes[c].content)), c))
    return entry
