"""
Multi-hop references and a small head-to-head benchmark
========================================================

Clause 4.8(g) of the 2024 addendum says "use diaphragm walls" and points to
Clause 9.3.10.5 for the wall thickness, which in turn points to a drawing
for the entrance boundaries.  The crawler follows those citations
breadth-first and keeps the provenance of every hop.
"""

from clausegraph.corpus import fixture_corpus_path, load_corpus
from clausegraph.crawler import answer_text, crawl, render_context
from clausegraph.evaluation import load_bench, overlap_coefficient, run_benchmark
from clausegraph.graph import build_graph
from clausegraph.retrieval import build_index

graph = build_graph(load_corpus(fixture_corpus_path()))

trace = crawl(graph, "Tender_Addendum_03_Vol1to6::4.8(g)", max_depth=3)
for hop in trace.hops:
    print(hop.depth, hop.via.value, hop.node)
print(render_context(trace, graph))

# %%
# Depth limits are explicit: with max_depth=1 the drawing is not reached and
# the trace says so.

short = crawl(graph, "Tender_Addendum_03_Vol1to6::4.8(g)", max_depth=1)
print(short.nodes, "truncated:", short.truncated)

# %%
# Scoring uses the overlap coefficient: the share of the answer's keywords
# that also occur in the reference snippet.  It rewards precision, so a long
# answer that adds true but unrequested words is penalised.

golden = (
    "The ERSS for the station box must be constructed using Diaphragm walls with a "
    "minimum thickness of 1200mm."
)
print(round(overlap_coefficient(answer_text(trace, graph), golden), 3))
print(round(overlap_coefficient("Diaphragm walls, minimum thickness 1200mm.", golden), 3))

# %%
# The shipped six-question bench: lexical top-1 against the graph crawl.

report = run_benchmark(graph, build_index(graph), load_bench(fixture_corpus_path().parent / "bench.json"))
print(report.to_table())
for r in report.results:
    print(f"{r.id:34s} baseline {r.baseline_score:.2f} ({r.baseline_category.value:10s}) "
          f"graph {r.kg_score:.2f} ({r.kg_category.value})")
