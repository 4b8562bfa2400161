"""Recursive reference crawler.

Resolves an entry clause to its valid version, then walks REFERS_TO edges
breadth-first with a visited set and a depth bound, collecting every hop with
its provenance.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .graph import EdgeKind, KnowledgeGraph, NodeKind, split_node_id

DEFAULT_MAX_DEPTH = 3


class Via(enum.Enum):
    ROOT = "ROOT"
    SUPERSEDES = "SUPERSEDES"
    REFERS_TO = "REFERS_TO"


@dataclass(frozen=True)
class CrawlHop:
    node: str
    depth: int
    via: Via
    content_snapshot: str
    # set when a REFERS_TO target was itself superseded and the hop landed on its valid version
    redirected_from: str | None = None

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if (self.depth == 0) != (self.via is Via.ROOT):
            raise ValueError("depth 0 iff via == ROOT")

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "depth": self.depth,
            "via": self.via.value,
            "content": self.content_snapshot,
            "redirected_from": self.redirected_from,
        }


@dataclass(frozen=True)
class CrawlTrace:
    hops: tuple[CrawlHop, ...]
    truncated: bool = False
    deleted: bool = False  # the entry's valid version is a tombstone

    @property
    def nodes(self) -> list[str]:
        return [h.node for h in self.hops]

    @property
    def root(self) -> CrawlHop:
        return self.hops[0]

    def to_dict(self) -> dict:
        return {
            "hops": [h.to_dict() for h in self.hops],
            "truncated": self.truncated,
            "deleted": self.deleted,
        }


def _bfs(
    graph: KnowledgeGraph,
    start: str,
    max_depth: int,
    visited: set[str],
    depth_offset: int = 0,
) -> tuple[list[CrawlHop], bool]:
    """BFS over REFERS_TO from ``start``; ``start`` itself is not emitted."""
    hops: list[CrawlHop] = []
    truncated = False
    queue = deque([(start, 0)])
    while queue:
        current, depth = queue.popleft()
        for target in graph.successors(current, EdgeKind.REFERS_TO):
            landed = graph.resolve(target)
            if landed in visited:
                continue
            if depth >= max_depth:
                truncated = True
                break
            visited.add(landed)
            hops.append(
                CrawlHop(
                    node=landed,
                    depth=depth_offset + depth + 1,
                    via=Via.REFERS_TO,
                    content_snapshot=graph.nodes[landed].content,
                    redirected_from=target if landed != target else None,
                )
            )
            queue.append((landed, depth + 1))
    return hops, truncated


def crawl(graph: KnowledgeGraph, start: str, max_depth: int = DEFAULT_MAX_DEPTH) -> CrawlTrace:
    """Breadth-first REFERS_TO traversal from ``start``.

    Nodes at ``max_depth`` are emitted but not expanded; ``truncated`` records
    whether that pruned anything.  A referenced clause that has been superseded
    is replaced by its valid version before it is emitted.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    node = graph.node(start)
    root = CrawlHop(start, 0, Via.ROOT, node.content)
    hops, truncated = _bfs(graph, start, max_depth, {start})
    return CrawlTrace((root, *hops), truncated)


def resolve_and_crawl(
    graph: KnowledgeGraph, entry: str, max_depth: int = DEFAULT_MAX_DEPTH
) -> CrawlTrace:
    """Walk the supersession chain from ``entry``, then crawl from the valid clause.

    References held by superseded clauses are not followed.  ``max_depth``
    bounds the REFERS_TO distance from the valid clause; hop depths count the
    supersession hops too.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    chain = graph.supersession_chain(entry)
    hops = [CrawlHop(entry, 0, Via.ROOT, graph.nodes[entry].content)]
    for i, node_id in enumerate(chain[1:], start=1):
        hops.append(CrawlHop(node_id, i, Via.SUPERSEDES, graph.nodes[node_id].content))

    terminal = chain[-1]
    if graph.nodes[terminal].deleted:
        return CrawlTrace(tuple(hops), truncated=False, deleted=True)
    more, truncated = _bfs(graph, terminal, max_depth, set(chain), depth_offset=len(chain) - 1)
    return CrawlTrace(tuple(hops + more), truncated)


def _display_content(hop: CrawlHop, graph: KnowledgeGraph) -> str:
    node = graph.node(hop.node)
    if node.deleted:
        return "[DELETED]"
    if graph.is_superseded(hop.node):
        return f"[SUPERSEDED] {hop.content_snapshot}"
    if not hop.content_snapshot and node.kind is NodeKind.DRAWING:
        return "[not in corpus]"
    return hop.content_snapshot


def render_context(trace: CrawlTrace, graph: KnowledgeGraph) -> str:
    """Plain-text aggregation of a trace, root block first.

    ::

        ROOT SOURCE: [<doc> - <clause>]
        Content: <text>

        >> <VIA> [<doc> <clause>] depth=<d>
           Content: <text>
    """
    if not trace.hops:
        return ""
    root = trace.hops[0]
    doc, clause = split_node_id(root.node)
    blocks = [f"ROOT SOURCE: [{doc} - {clause}]\nContent: {_display_content(root, graph)}"]
    for hop in trace.hops[1:]:
        doc, clause = split_node_id(hop.node)
        blocks.append(
            f">> {hop.via.value} [{doc} {clause}] depth={hop.depth}\n"
            f"   Content: {_display_content(hop, graph)}"
        )
    return "\n\n".join(blocks) + "\n"


def answer_text(trace: CrawlTrace, graph: KnowledgeGraph) -> str:
    """Extractive answer: the text of every still-valid hop, in trace order.

    Superseded history, tombstones and provenance headers are left out.  A
    referenced document that is not in the corpus contributes its id, since
    naming it is the answer.
    """
    parts = []
    for hop in trace.hops:
        node = graph.node(hop.node)
        if node.deleted or graph.is_superseded(hop.node):
            continue
        if hop.content_snapshot:
            parts.append(hop.content_snapshot)
        elif node.kind is NodeKind.DRAWING:
            parts.append(node.doc_id)
    return "\n".join(parts)
