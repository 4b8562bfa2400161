from __future__ import annotations

import datetime as dt
import json

import pydot
import pytest

from clausegraph.corpus import ClauseBlock, Corpus, Document, DocumentMeta
from clausegraph.citations import CallableExtractor, ExtractionResult
from clausegraph.errors import (
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
from clausegraph.graph import (
    EdgeKind,
    KnowledgeGraph,
    NodeKind,
    build_graph,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    make_node_id,
    save_graph,
    split_node_id,
    to_dot,
)

from conftest import AMEND, BASE, DRAWING, TENDER

S, R, C = EdgeKind.SUPERSEDES, EdgeKind.REFERS_TO, EdgeKind.CONTAINS


def test_add_clause_node_returns_id():
    g = KnowledgeGraph()
    assert g.add_clause_node("BaseContract", "12.1", "Grade 25 Concrete", "2020-01-01") == "BaseContract::12.1"
    with pytest.raises(DuplicateNode):
        g.add_clause_node("BaseContract", "12.1", "again", "2020-01-01")


def test_drawing_placeholder_node():
    g = KnowledgeGraph()
    nid = g.add_clause_node(DRAWING, "*", "<placeholder>", "2024-10-10", NodeKind.DRAWING)
    assert nid == f"{DRAWING}::*"
    assert g.node(nid).kind is NodeKind.DRAWING


@pytest.mark.parametrize("bad", ["nosep", "::x", "x::", "a::b::c"])
def test_node_id_needs_one_separator(bad):
    with pytest.raises(ValueError):
        split_node_id(bad)


def test_make_node_id_rejects_separator_in_doc():
    with pytest.raises(ValueError):
        make_node_id("a::b", "1")


def test_clause_node_requires_content_unless_deleted():
    g = KnowledgeGraph()
    with pytest.raises(ValueError):
        g.add_clause_node("D", "1", "", "2020-01-01")
    g.add_clause_node("D", "2", "", "2020-01-01", deleted=True)


def _pair(old="2020-01-01", new="2024-06-01"):
    g = KnowledgeGraph()
    base = g.add_clause_node("BaseContract", "12.1", "Grade 25 Concrete", old)
    amend = g.add_clause_node("Amendment_07", "1", "Grade 30 Concrete", new)
    return g, base, amend


def test_supersedes_newer_to_older_ok():
    g, base, amend = _pair()
    g.add_edge(amend, base, S)
    assert g.get_valid_clause(base) == amend


def test_supersedes_two_cycle():
    g, a, b = _pair(new="2020-01-01")
    g.add_edge(a, b, S)
    with pytest.raises(CycleError):
        g.add_edge(b, a, S)


def test_supersedes_backwards_in_time():
    g, base, amend = _pair()
    with pytest.raises(TemporalOrderError):
        g.add_edge(base, amend, S)


def test_refers_to_missing_node():
    g, base, _ = _pair()
    with pytest.raises(MissingNode):
        g.add_edge(base, "Nope::1", R)


def test_self_loop():
    g, base, _ = _pair()
    with pytest.raises(SelfLoop):
        g.add_edge(base, base, R)


def test_refers_to_cycles_are_allowed():
    g, a, b = _pair()
    g.add_edge(a, b, R)
    g.add_edge(b, a, R)
    assert g.edge_count(R) == 2


def test_duplicate_edge_is_idempotent():
    g, base, amend = _pair()
    g.add_edge(amend, base, S)
    g.add_edge(amend, base, S)
    assert g.edge_count() == 1


def test_frozen_graph_rejects_mutation(graph):
    with pytest.raises(FrozenGraphError):
        graph.add_clause_node("X", "1", "x", "2020-01-01")


def test_most_recent_superseder_wins():
    g = KnowledgeGraph()
    base = g.add_clause_node("B", "1", "v0", "2020-01-01")
    mid = g.add_clause_node("M", "1", "v1", "2022-06-15")
    late = g.add_clause_node("L", "1", "v2", "2024-10-10")
    g.add_edge(mid, base, S)
    g.add_edge(late, base, S)
    assert g.get_valid_clause(base) == late


def test_same_day_superseders_tie_to_greatest_id():
    g = KnowledgeGraph()
    base = g.add_clause_node("B", "1", "v0", "2020-01-01")
    for doc in ("P", "Q"):
        g.add_edge(g.add_clause_node(doc, "1", "v", "2021-01-01"), base, S)
    assert g.get_valid_clause(base) == "Q::1"


def test_unsuperseded_is_fixed_point(graph):
    node = f"{BASE}::4.5"
    assert graph.get_valid_clause(node) == node
    assert graph.supersession_chain(node) == [node]


@pytest.mark.parametrize("k", [0, 1, 5, 20])
def test_synthetic_chain_length(k):
    g = KnowledgeGraph()
    ids = [g.add_clause_node("Base", "1", "v0", dt.date(2000, 1, 1))]
    for i in range(1, k + 1):
        ids.append(g.add_clause_node(f"Amend{i}", "1", f"v{i}", dt.date(2000 + i, 1, 1)))
        g.add_edge(ids[-1], ids[-2], S)
    assert g.supersession_chain(ids[0]) == ids
    assert len(g.supersession_chain(ids[0])) == k + 1


# -- fixture graph --------------------------------------------------------------


def test_fixture_supersession_edges(graph):
    # hand count of replace/delete directives: two Replace of 4.2, one Delete of 4.8(a)
    supersedes = sorted((e.source, e.target) for e in graph.edges if e.kind is S)
    assert supersedes == [
        (f"{AMEND}::4.2", f"{BASE}::4.2"),
        (f"{TENDER}::4.2", f"{AMEND}::4.2"),
        (f"{TENDER}::4.8(a)", f"{AMEND}::4.8(a)"),
    ]


def test_fixture_grade_chain(graph):
    chain = graph.supersession_chain(f"{BASE}::4.2")
    assert chain == [f"{BASE}::4.2", f"{AMEND}::4.2", f"{TENDER}::4.2"]
    assert "Grade 40 Concrete (High Strength)" in graph.nodes[chain[-1]].content
    assert [graph.nodes[n].date.year for n in chain] == [2020, 2022, 2024]


def test_derived_nodes_hang_off_their_blocks(graph):
    assert graph.predecessors(f"{TENDER}::4.2", C) == [f"{TENDER}::Clarification No. 12"]
    assert graph.predecessors(f"{AMEND}::4.2", C) == [f"{AMEND}::Item 1"]


def test_fixture_reference_path(graph):
    assert graph.successors(f"{TENDER}::4.8(g)", R) == [f"{TENDER}::9.3.10.5"]
    assert graph.successors(f"{TENDER}::9.3.10.5", R) == [f"{DRAWING}::*"]
    assert graph.node(f"{DRAWING}::*").kind is NodeKind.DRAWING


def test_base_48_is_amended_not_superseded(graph):
    assert graph.resolve(f"{BASE}::4.8") == f"{BASE}::4.8"
    assert f"{AMEND}::4.8(a)" in graph.successors(f"{BASE}::4.8", C)


def test_deleted_clause(graph):
    with pytest.raises(DeletedClause) as exc:
        graph.get_valid_clause(f"{AMEND}::4.8(a)")
    assert exc.value.tombstone == f"{TENDER}::4.8(a)"
    assert graph.node(exc.value.tombstone).deleted


def test_node_dates_match_documents(graph, corpus):
    dates = {d.doc_id: d.meta.day for d in corpus}
    for node in graph.nodes.values():
        if node.doc_id in dates:
            assert node.date == dates[node.doc_id]


def test_plain_document_has_no_supersession():
    blocks = tuple(ClauseBlock(str(i), f"Clause text number {i}.") for i in range(1, 5))
    g = build_graph(Corpus((Document(DocumentMeta("Plain", "2021-01-01"), blocks),)))
    clauses = [n for n in g.nodes.values() if n.kind is NodeKind.CLAUSE]
    assert len(clauses) == 4
    assert g.edge_count(C) == 4 and g.edge_count(S) == 0


def test_unknown_target_clause_raises():
    doc = Document(DocumentMeta("D", "2021-01-01"), (ClauseBlock("1", "For details refer to Clause 7.7."),))
    with pytest.raises(UnresolvedTarget):
        build_graph(Corpus((doc,)))


def test_nondeterministic_extractor_rejected(corpus):
    with pytest.raises(ValidationError):
        build_graph(corpus, CallableExtractor(lambda t, d: ExtractionResult(False, ())))


def test_build_is_deterministic(corpus, graph):
    assert build_graph(corpus) == graph


# -- persistence and DOT ----------------------------------------------------------


def test_round_trip(tmp_path, graph):
    path = tmp_path / "g.json"
    save_graph(graph, path)
    loaded = load_graph(path)
    assert loaded.nodes == graph.nodes and loaded.edges == graph.edges


def test_empty_round_trip():
    g = graph_from_dict(graph_to_dict(KnowledgeGraph()))
    assert len(g) == 0 and g.edge_count() == 0


def test_unknown_schema_version(tmp_path, graph):
    data = graph_to_dict(graph)
    data["schema_version"] = 99
    path = tmp_path / "g.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaVersionError):
        load_graph(path)


def test_bad_graph_files(tmp_path):
    with pytest.raises(NotFound):
        load_graph(tmp_path / "missing.json")
    path = tmp_path / "broken.json"
    path.write_text("{")
    with pytest.raises(ParseError):
        load_graph(path)


def test_dot_supersedes_labels(graph):
    assert to_dot(graph).count('label="SUPERSEDES"') == 3


def test_empty_dot():
    assert to_dot(KnowledgeGraph()).replace("\n", "") == "digraph {}"


def test_dot_parses_with_matching_counts(graph):
    (parsed,) = pydot.graph_from_dot_data(to_dot(graph))
    assert len(parsed.get_nodes()) == len(graph)
    assert len(parsed.get_edges()) == graph.edge_count()
