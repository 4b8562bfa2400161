"""Temporal clause graph with SUPERSEDES / REFERS_TO / CONTAINS edges.

Node ids are ``"<doc_id>::<clause_id>"``.  A SUPERSEDES edge points from the
newer clause to the one it replaces, so the currently valid version of a
clause is found by walking SUPERSEDES edges backwards until nothing
supersedes the current node.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from .citations import (
    WHOLE_DOCUMENT,
    Directive,
    DirectiveKind,
    ReferenceExtractor,
    RuleBasedExtractor,
    introduced_text,
    parse_directives,
)
from .corpus import NODE_SEPARATOR, Corpus, Severity, validate_corpus
from .errors import (
    CycleError,
    DeletedClause,
    DuplicateNode,
    FrozenGraphError,
    MissingNode,
    NotFound,
    ParseError,
    SchemaVersionError,
    SelfLoop,
    TemporalOrderError,
    UnresolvedTarget,
    ValidationError,
)

SCHEMA_VERSION = 1


def make_node_id(doc_id: str, clause_id: str) -> str:
    if not doc_id or not clause_id:
        raise ValueError("doc_id and clause_id must be non-empty")
    if NODE_SEPARATOR in doc_id or NODE_SEPARATOR in clause_id:
        raise ValueError(f"'::' is reserved: {doc_id!r}, {clause_id!r}")
    return f"{doc_id}{NODE_SEPARATOR}{clause_id}"


def split_node_id(node_id: str) -> tuple[str, str]:
    doc_id, sep, clause_id = node_id.partition(NODE_SEPARATOR)
    if not sep or not doc_id or not clause_id or NODE_SEPARATOR in clause_id:
        raise ValueError(f"malformed node id {node_id!r}")
    return doc_id, clause_id


class NodeKind(enum.Enum):
    CLAUSE = "Clause"
    DOCUMENT = "Document"
    DRAWING = "Drawing"


class EdgeKind(enum.Enum):
    SUPERSEDES = "SUPERSEDES"
    REFERS_TO = "REFERS_TO"
    CONTAINS = "CONTAINS"


@dataclass(frozen=True)
class ClauseNode:
    id: str
    content: str
    date: dt.date
    kind: NodeKind = NodeKind.CLAUSE
    deleted: bool = False

    @property
    def doc_id(self) -> str:
        return split_node_id(self.id)[0]

    @property
    def clause_id(self) -> str:
        return split_node_id(self.id)[1]


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    kind: EdgeKind

    @property
    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.kind.value)


def _as_date(value) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    return dt.date.fromisoformat(value)


class KnowledgeGraph:
    """Directed graph of clause nodes with typed edges.

    Mutable while being built; :meth:`freeze` makes it read-only.
    """

    def __init__(self):
        self.nodes: dict[str, ClauseNode] = {}
        self._out: dict[str, dict[EdgeKind, set[str]]] = defaultdict(lambda: defaultdict(set))
        self._in: dict[str, dict[EdgeKind, set[str]]] = defaultdict(lambda: defaultdict(set))
        self._edge_count = 0
        self.frozen = False

    # -- construction -------------------------------------------------

    def _check_mutable(self):
        if self.frozen:
            raise FrozenGraphError("graph is frozen")

    def add_node(self, node: ClauseNode) -> str:
        self._check_mutable()
        split_node_id(node.id)
        if node.id in self.nodes:
            raise DuplicateNode(f"node {node.id!r} already exists")
        if not node.content and not node.deleted and node.kind is NodeKind.CLAUSE:
            raise ValueError(f"clause node {node.id!r} needs content")
        self.nodes[node.id] = node
        return node.id

    def add_clause_node(
        self,
        doc_id: str,
        clause_id: str,
        content: str,
        date,
        kind: NodeKind = NodeKind.CLAUSE,
        deleted: bool = False,
    ) -> str:
        node_id = make_node_id(doc_id, clause_id)
        return self.add_node(ClauseNode(node_id, content, _as_date(date), kind, deleted))

    def add_edge(self, source: str, target: str, kind: EdgeKind) -> None:
        """Insert an edge once; re-inserting the same edge is a no-op."""
        self._check_mutable()
        for n in (source, target):
            if n not in self.nodes:
                raise MissingNode(f"no such node {n!r}")
        if source == target:
            raise SelfLoop(f"self-loop on {source!r}")
        if source in self._out and target in self._out[source].get(kind, ()):
            return
        if kind is EdgeKind.SUPERSEDES:
            if self._reaches(target, source, EdgeKind.SUPERSEDES):
                raise CycleError(f"SUPERSEDES {source!r} -> {target!r} would close a cycle")
            if self.nodes[source].date < self.nodes[target].date:
                raise TemporalOrderError(
                    f"{source!r} ({self.nodes[source].date}) cannot supersede "
                    f"newer {target!r} ({self.nodes[target].date})"
                )
        self._out[source][kind].add(target)
        self._in[target][kind].add(source)
        self._edge_count += 1

    def _reaches(self, start: str, goal: str, kind: EdgeKind) -> bool:
        stack, seen = [start], {start}
        while stack:
            n = stack.pop()
            if n == goal:
                return True
            for m in self._out[n].get(kind, ()) if n in self._out else ():
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return False

    def freeze(self) -> "KnowledgeGraph":
        self.frozen = True
        return self

    # -- queries ------------------------------------------------------

    def __contains__(self, node_id) -> bool:
        return node_id in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def node(self, node_id: str) -> ClauseNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise MissingNode(f"no such node {node_id!r}") from None

    @property
    def edges(self) -> set[Edge]:
        return {
            Edge(s, t, kind)
            for s, by_kind in self._out.items()
            for kind, targets in by_kind.items()
            for t in targets
        }

    def edge_count(self, kind: EdgeKind | None = None) -> int:
        if kind is None:
            return self._edge_count
        return sum(len(by_kind.get(kind, ())) for by_kind in self._out.values())

    def node_counts(self) -> dict[str, int]:
        counts = {k.value: 0 for k in NodeKind}
        counts["Tombstone"] = 0
        for n in self.nodes.values():
            counts["Tombstone" if n.deleted else n.kind.value] += 1
        return counts

    def successors(self, node_id: str, kind: EdgeKind) -> list[str]:
        self.node(node_id)
        return sorted(self._out[node_id].get(kind, ())) if node_id in self._out else []

    def predecessors(self, node_id: str, kind: EdgeKind) -> list[str]:
        self.node(node_id)
        return sorted(self._in[node_id].get(kind, ())) if node_id in self._in else []

    def is_superseded(self, node_id: str) -> bool:
        return bool(self.predecessors(node_id, EdgeKind.SUPERSEDES))

    def _latest_superseder(self, node_id: str) -> str | None:
        superseders = self.predecessors(node_id, EdgeKind.SUPERSEDES)
        if not superseders:
            return None
        # most recent date wins; ties go to the lexicographically greatest id
        return max(superseders, key=lambda n: (self.nodes[n].date, n))

    def supersession_chain(self, base: str) -> list[str]:
        """Path from ``base`` to its currently valid version, oldest first."""
        self.node(base)
        chain = [base]
        nxt = self._latest_superseder(base)
        while nxt is not None:
            chain.append(nxt)
            nxt = self._latest_superseder(nxt)
        return chain

    def resolve(self, base: str) -> str:
        """Terminal node of the supersession chain, tombstones included."""
        return self.supersession_chain(base)[-1]

    def get_valid_clause(self, base: str) -> str:
        """Most current version of ``base``; raises DeletedClause for a tombstone."""
        terminal = self.resolve(base)
        if self.nodes[terminal].deleted:
            raise DeletedClause(
                f"{base!r} was deleted without replacement by {terminal!r}",
                tombstone=terminal,
                base=base,
            )
        return terminal

    def is_source_clause(self, node_id: str) -> bool:
        """True for a clause node that stands for a clause block of the corpus.

        Clauses introduced by an amendment hang off their block instead of a
        Document node.
        """
        node = self.node(node_id)
        if node.kind is not NodeKind.CLAUSE or node.deleted:
            return False
        return any(
            self.nodes[p].kind is NodeKind.DOCUMENT
            for p in self.predecessors(node_id, EdgeKind.CONTAINS)
        )

    def introduced_clauses(self, node_id: str) -> list[str]:
        """Live clause nodes a source clause block introduces (Replace/Add payloads)."""
        if not self.is_source_clause(node_id):
            return []
        return [
            c for c in self.successors(node_id, EdgeKind.CONTAINS)
            if self.nodes[c].kind is NodeKind.CLAUSE and not self.nodes[c].deleted
        ]

    def find_clause(self, clause_id: str) -> list[str]:
        """All node ids whose clause part equals ``clause_id``."""
        return sorted(n for n in self.nodes if split_node_id(n)[1] == clause_id)


# -- building from a corpus ---------------------------------------------------


_SUBSECTION_RE = re.compile(r"^(?P<parent>.+?)\((?P<sub>[^()]+)\)$")


@dataclass
class _Pending:
    directive: Directive
    source_node: str
    location: str


class _Builder:
    def __init__(self, corpus: Corpus, extractor: ReferenceExtractor):
        self.corpus = corpus
        self.extractor = extractor
        self.graph = KnowledgeGraph()
        self.doc_ids = {d.doc_id for d in corpus}
        self.supersessions: list[_Pending] = []
        self.references: list[_Pending] = []

    def run(self) -> KnowledgeGraph:
        ordered = sorted(enumerate(self.corpus.documents), key=lambda p: (p[1].meta.day, p[0]))
        for _, doc in ordered:
            self._add_document(doc)
        for pending in self.supersessions:
            self._link_supersession(pending)
        for pending in self.references:
            self._link_reference(pending)
        self._link_subsections()
        return self.graph.freeze()

    def _add_document(self, doc) -> None:
        g = self.graph
        day = doc.meta.day
        summary = ". ".join(p for p in (doc.meta.title, doc.meta.description) if p) or doc.doc_id
        doc_node = g.add_clause_node(doc.doc_id, WHOLE_DOCUMENT, summary, day, NodeKind.DOCUMENT)

        for block in doc.clauses:
            location = f"{doc.doc_id}{NODE_SEPARATOR}{block.clause_id}"
            text = block.body
            directives = parse_directives(text, doc.doc_id, block.clause_id, self.extractor)
            block_node = g.add_clause_node(doc.doc_id, block.clause_id, text, day)
            g.add_edge(doc_node, block_node, EdgeKind.CONTAINS)

            owners: list[tuple[tuple[int, int], str]] = []
            for d in directives:
                if d.kind is DirectiveKind.REFERENCE:
                    continue
                if d.kind is DirectiveKind.DELETE_CLAUSE:
                    new = self._add_derived(doc.doc_id, d.target_section, "", day, location, deleted=True)
                else:
                    body = introduced_text(text, d)
                    if not body:
                        raise ValidationError(
                            f"{location}: {d.kind.value} of clause {d.replacement_section!r} introduces no text"
                        )
                    new = self._add_derived(doc.doc_id, d.replacement_section, body, day, location)
                    owners.append((d.content_span, new))
                g.add_edge(block_node, new, EdgeKind.CONTAINS)
                if d.kind is not DirectiveKind.ADD_CLAUSE:
                    self.supersessions.append(_Pending(d, new, location))

            for d in directives:
                if d.kind is not DirectiveKind.REFERENCE:
                    continue
                source = block_node
                for (start, end), owner in owners:
                    if start <= d.span[0] and d.span[1] <= end:
                        source = owner
                self.references.append(_Pending(d, source, location))

    def _add_derived(self, doc_id, clause_id, content, day, location, deleted=False) -> str:
        try:
            return self.graph.add_clause_node(doc_id, clause_id, content, day, deleted=deleted)
        except DuplicateNode as exc:
            raise DuplicateNode(f"{location}: {exc}") from None

    def _latest_with_clause(self, clause_id: str, before: dt.date, exclude: str) -> str | None:
        g = self.graph
        candidates = [
            n for n in g.find_clause(clause_id)
            if n != exclude and g.nodes[n].date <= before and g.nodes[n].kind is NodeKind.CLAUSE
        ]
        if not candidates:
            return None
        return max(candidates, key=lambda n: (g.nodes[n].date, n))

    def _resolve(self, pending: _Pending) -> str | None:
        d = pending.directive
        g = self.graph
        source = g.nodes[pending.source_node]
        doc = d.target_document or d.source_doc
        named = make_node_id(doc, d.target_section)
        if named in g.nodes and named != pending.source_node:
            return named
        if d.target_document and d.target_document not in self.doc_ids:
            return None
        return self._latest_with_clause(d.target_section, source.date, pending.source_node)

    def _link_supersession(self, pending: _Pending) -> None:
        target = self._resolve(pending)
        if target is None:
            d = pending.directive
            where = d.target_document or "any document"
            raise UnresolvedTarget(
                f"{pending.location}: {d.kind.value} targets clause {d.target_section!r} "
                f"which does not exist in {where}"
            )
        self.graph.add_edge(pending.source_node, target, EdgeKind.SUPERSEDES)

    def _link_reference(self, pending: _Pending) -> None:
        d = pending.directive
        g = self.graph
        target = self._resolve(pending)
        if target is None and d.target_document and d.target_document not in self.doc_ids:
            target = make_node_id(d.target_document, d.target_section)
            if target not in g.nodes:
                g.add_clause_node(
                    d.target_document, d.target_section, "", g.nodes[pending.source_node].date,
                    NodeKind.DRAWING,
                )
        if target is None:
            raise UnresolvedTarget(
                f"{pending.location}: reference {d.surface_text!r} points at clause "
                f"{d.target_section!r} which does not exist in any document"
            )
        if target != pending.source_node:
            g.add_edge(pending.source_node, target, EdgeKind.REFERS_TO)

    def _link_subsections(self) -> None:
        g = self.graph
        for node_id in sorted(g.nodes):
            node = g.nodes[node_id]
            if node.kind is not NodeKind.CLAUSE or node.deleted:
                continue
            m = _SUBSECTION_RE.match(node.clause_id)
            if not m:
                continue
            parent = make_node_id(node.doc_id, m.group("parent"))
            if parent not in g.nodes:
                parent = self._latest_with_clause(m.group("parent"), node.date, node_id)
            if parent is not None and not g.nodes[parent].deleted:
                g.add_edge(parent, node_id, EdgeKind.CONTAINS)


def build_graph(corpus: Corpus, extractor: ReferenceExtractor | None = None) -> KnowledgeGraph:
    """Build and freeze the clause graph for ``corpus``.

    Raises ValidationError for an invalid corpus or a non-deterministic
    extractor, UnresolvedTarget when a directive names a clause that exists
    nowhere, and lets extractor errors propagate.
    """
    extractor = extractor or RuleBasedExtractor()
    if not getattr(extractor, "deterministic", False):
        raise ValidationError(
            f"extractor {getattr(extractor, 'name', extractor)!r} is not deterministic"
        )
    diags = [d for d in validate_corpus(corpus) if d.severity is Severity.ERROR]
    if diags:
        raise ValidationError("; ".join(map(str, diags)), diags)
    return _Builder(corpus, extractor).run()


# -- persistence ----------------------------------------------------------------


def graph_to_dict(graph: KnowledgeGraph) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "nodes": [
            {
                "id": n.id,
                "content": n.content,
                "date": n.date.isoformat(),
                "kind": n.kind.value,
                "deleted": n.deleted,
            }
            for n in sorted(graph.nodes.values(), key=lambda n: n.id)
        ],
        "edges": [
            {"source": e.source, "target": e.target, "kind": e.kind.value}
            for e in sorted(graph.edges, key=lambda e: e.sort_key)
        ],
    }


def graph_from_dict(data: dict) -> KnowledgeGraph:
    if not isinstance(data, dict):
        raise ParseError("graph file must hold a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    graph = KnowledgeGraph()
    try:
        for n in data["nodes"]:
            graph.add_node(
                ClauseNode(
                    id=n["id"],
                    content=n["content"],
                    date=dt.date.fromisoformat(n["date"]),
                    kind=NodeKind(n["kind"]),
                    deleted=bool(n.get("deleted", False)),
                )
            )
        edges = [Edge(e["source"], e["target"], EdgeKind(e["kind"])) for e in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph file: {exc!r}") from None
    # SUPERSEDES chains are acyclic, so insertion order among them never matters
    for e in edges:
        graph.add_edge(e.source, e.target, e.kind)
    return graph.freeze()


def save_graph(graph: KnowledgeGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=1) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> KnowledgeGraph:
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"graph file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, str(path), exc.lineno) from None
    return graph_from_dict(data)


# -- DOT export ------------------------------------------------------------------

_NODE_STYLE = {
    NodeKind.CLAUSE: 'shape=box',
    NodeKind.DOCUMENT: 'shape=folder',
    NodeKind.DRAWING: 'shape=note',
}
_EDGE_STYLE = {
    EdgeKind.SUPERSEDES: "color=red",
    EdgeKind.REFERS_TO: "color=blue",
    EdgeKind.CONTAINS: "color=gray, style=dotted",
}


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def to_dot(graph: KnowledgeGraph) -> str:
    lines = ["digraph {"]
    for n in sorted(graph.nodes.values(), key=lambda n: n.id):
        if n.deleted:
            attrs = f"label={_dot_quote(n.id + ' (deleted)')}, shape=box, style=dashed, color=gray"
        else:
            attrs = f"label={_dot_quote(n.id)}, {_NODE_STYLE[n.kind]}"
        lines.append(f"  {_dot_quote(n.id)} [{attrs}];")
    for e in sorted(graph.edges, key=lambda e: e.sort_key):
        lines.append(
            f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} "
            f"[label={_dot_quote(e.kind.value)}, {_EDGE_STYLE[e.kind]}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(graph: KnowledgeGraph, path: str | Path) -> None:
    Path(path).write_text(to_dot(graph), encoding="utf-8")
