from __future__ import annotations

import pytest

from clausegraph.corpus import fixture_corpus_path, load_corpus
from clausegraph.evaluation import load_bench
from clausegraph.graph import build_graph
from clausegraph.retrieval import build_index

BASE = "Base_Contract_Vol1"
AMEND = "Amendment_01_Vol2"
TENDER = "Tender_Addendum_03_Vol1to6"
DRAWING = "Drawing_17.3.1_Demarcation_Plan"


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(fixture_corpus_path())


@pytest.fixture(scope="session")
def graph(corpus):
    return build_graph(corpus)


@pytest.fixture(scope="session")
def index(graph):
    return build_index(graph)


@pytest.fixture(scope="session")
def bench():
    return load_bench(fixture_corpus_path().parent / "bench.json")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import GATE
    except ImportError:
        return
    if GATE:
        terminalreporter.section("acceptance gate")
        for line in sorted(GATE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
