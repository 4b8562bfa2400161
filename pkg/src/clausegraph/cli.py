"""``clausegraph`` command line.

Exit codes: 0 success, 1 validation or domain error, 2 I/O, 3 the clause
asked about was deleted, 4 the query has no searchable words.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .corpus import fixture_corpus_path, load_corpus
from .crawler import DEFAULT_MAX_DEPTH, crawl, render_context, resolve_and_crawl
from .errors import ClauseGraphError, DeletedClause, EmptyQuery, NotFound, ValidationError
from .evaluation import DEFAULT_THRESHOLD, load_bench, run_benchmark
from .graph import EdgeKind, build_graph, export_dot, load_graph, save_graph
from .retrieval import STOPWORDS, build_index, select_entry, top_k

CONFIG_ENV = "CLAUSEGRAPH_CONFIG"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2
EXIT_DELETED = 3
EXIT_EMPTY_QUERY = 4


@dataclass(frozen=True)
class CliConfig:
    corpus_path: str = ""
    graph_path: str = "clausegraph.graph.json"
    max_depth: int = DEFAULT_MAX_DEPTH
    top_k: int = 3
    correct_threshold: float = DEFAULT_THRESHOLD
    format: str = "text"

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValidationError("max_depth must be >= 0")
        if self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        if not 0.0 <= self.correct_threshold <= 1.0:
            raise ValidationError("correct_threshold must lie in [0, 1]")
        if self.format not in ("text", "json"):
            raise ValidationError("format must be 'text' or 'json'")

    @classmethod
    def from_file(cls, path: str | Path) -> "CliConfig":
        path = Path(path)
        if not path.is_file():
            raise NotFound(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: {exc.msg} (line {exc.lineno})") from None
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known) if isinstance(data, dict) else ["<not an object>"]
        if unknown:
            raise ValidationError(f"{path}: unknown config keys {unknown}")
        return cls(**data)


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _err(msg: str) -> None:
    print(f"clausegraph: {msg}", file=sys.stderr)


# -- commands -------------------------------------------------------------------


def cmd_build(cfg: CliConfig, args) -> int:
    corpus_path = args.corpus_arg or cfg.corpus_path
    if not corpus_path:
        raise ValidationError("no corpus given (positional argument, --corpus or config)")
    graph = build_graph(load_corpus(corpus_path))
    save_graph(graph, cfg.graph_path)
    summary = {
        "graph": cfg.graph_path,
        "nodes": graph.node_counts(),
        "edges": {k.value: graph.edge_count(k) for k in EdgeKind},
    }
    if cfg.format == "json":
        _print_json(summary)
    nodes = ", ".join(f"{k}={v}" for k, v in summary["nodes"].items())
    edges = ", ".join(f"{k}={v}" for k, v in summary["edges"].items())
    print(f"built {cfg.graph_path}\n  nodes: {nodes}\n  edges: {edges}", file=sys.stderr)
    return EXIT_OK


def cmd_resolve(cfg: CliConfig, args) -> int:
    graph = load_graph(cfg.graph_path)
    chain = graph.supersession_chain(args.node)
    terminal = graph.nodes[chain[-1]]
    if cfg.format == "json":
        _print_json({
            "base": args.node,
            "chain": [
                {"node": n, "date": graph.nodes[n].date.isoformat(), "deleted": graph.nodes[n].deleted,
                 "content": graph.nodes[n].content}
                for n in chain
            ],
            "valid": None if terminal.deleted else terminal.id,
            "deleted": terminal.deleted,
        })
    else:
        for i, n in enumerate(chain):
            node = graph.nodes[n]
            tag = "deleted" if node.deleted else ("valid" if i == len(chain) - 1 else "superseded")
            print(f"{i}. {n} ({node.date.isoformat()}) [{tag}]")
        if not terminal.deleted:
            print(f"\n{terminal.content}")
    graph.get_valid_clause(args.node)  # raises DeletedClause for a tombstone
    return EXIT_OK


def _emit_trace(cfg: CliConfig, graph, trace, extra: dict | None = None) -> int:
    if cfg.format == "json":
        _print_json({**(extra or {}), **trace.to_dict()})
    else:
        sys.stdout.write(render_context(trace, graph))
    if trace.truncated:
        _err("crawl stopped at max depth; deeper references were not followed")
    if trace.deleted:
        _err(f"{trace.root.node} was deleted without replacement by {trace.hops[-1].node}")
        return EXIT_DELETED
    return EXIT_OK


def cmd_crawl(cfg: CliConfig, args) -> int:
    graph = load_graph(cfg.graph_path)
    depth = cfg.max_depth if args.max_depth is None else args.max_depth
    if args.no_resolve:
        trace = crawl(graph, args.node, depth)
    else:
        trace = resolve_and_crawl(graph, args.node, depth)
    return _emit_trace(cfg, graph, trace)


def cmd_query(cfg: CliConfig, args) -> int:
    graph = load_graph(cfg.graph_path)
    depth = cfg.max_depth if args.max_depth is None else args.max_depth
    k = cfg.top_k if args.k is None else args.k
    if k < 1:
        raise ValidationError("--k must be >= 1")
    index = build_index(graph)
    hits = top_k(index, args.question, k)
    if args.entry:
        entry = args.entry
        graph.node(entry)
    else:
        if not hits:
            raise EmptyQuery("the question has no searchable words")
        entry = select_entry(graph, index, args.question)
    trace = resolve_and_crawl(graph, entry, depth)
    extra = {
        "question": args.question,
        "hits": [{"node": h.node, "score": h.score} for h in hits],
        "entry": entry,
    }
    if cfg.format == "text":
        for h in hits:
            print(f"# hit {h.score:.4f} {h.node}")
        print(f"# entry {entry}\n")
    return _emit_trace(cfg, graph, trace, extra)


def cmd_bench(cfg: CliConfig, args) -> int:
    graph = load_graph(cfg.graph_path)
    threshold = cfg.correct_threshold if args.threshold is None else args.threshold
    depth = cfg.max_depth if args.max_depth is None else args.max_depth
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError("--threshold must lie in [0, 1]")
    bench_path = args.bench_file or fixture_corpus_path().parent / "bench.json"
    report = run_benchmark(graph, build_index(graph), load_bench(bench_path), depth, threshold)
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    if cfg.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.to_table())
        for b, label in (("baseline", "Lexical Baseline"), ("kg", "Knowledge Graph")):
            print(f"mean overlap ({label}): {report.mean_score(b):.4f}")
    return EXIT_OK


def cmd_export_dot(cfg: CliConfig, args) -> int:
    graph = load_graph(cfg.graph_path)
    export_dot(graph, args.out)
    if cfg.format == "json":
        _print_json({"out": args.out, "nodes": len(graph), "edges": graph.edge_count()})
    return EXIT_OK


def cmd_print_stopwords(cfg: CliConfig, args) -> int:
    words = sorted(STOPWORDS)
    if cfg.format == "json":
        _print_json(words)
    else:
        print("\n".join(words))
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="clausegraph",
        description="Temporal clause graph: build, resolve amendments, crawl references, benchmark.",
        epilog=f"Defaults may be set in a JSON config file named by ${CONFIG_ENV}.",
    )
    p.add_argument("--graph", help="graph file (read by every command, written by build)")
    p.add_argument("--format", choices=("text", "json"), help="output format")
    p.add_argument("--corpus", help="corpus directory or manifest (build)")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    b = sub.add_parser("build", help="load a corpus and save its graph")
    b.add_argument("corpus_arg", nargs="?", metavar="corpus", help="corpus directory or corpus.json")
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("resolve", help="show the supersession chain and valid text of a clause")
    r.add_argument("node", help="node id, e.g. Base_Contract_Vol1::4.2")
    r.set_defaults(func=cmd_resolve)

    c = sub.add_parser("crawl", help="resolve a clause and follow its references")
    c.add_argument("node")
    c.add_argument("--max-depth", type=int)
    c.add_argument("--no-resolve", action="store_true", help="crawl from the node as given")
    c.set_defaults(func=cmd_crawl)

    q = sub.add_parser("query", help="answer a question: lexical entry, then resolve and crawl")
    q.add_argument("question")
    q.add_argument("--max-depth", type=int)
    q.add_argument("--k", type=int, help="lexical hits to list")
    q.add_argument("--entry", help="explicit entry node instead of the lexical top hit")
    q.set_defaults(func=cmd_query)

    bench = sub.add_parser("bench", help="compare graph answers against the lexical baseline")
    bench.add_argument("bench_file", nargs="?", help="question file (default: shipped fixture bench)")
    bench.add_argument("--threshold", type=float)
    bench.add_argument("--max-depth", type=int)
    bench.add_argument("--out", help="write the JSON report here")
    bench.add_argument("--csv", help="write per-question CSV here")
    bench.set_defaults(func=cmd_bench)

    d = sub.add_parser("export-dot", help="write the graph as Graphviz DOT")
    d.add_argument("out")
    d.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("print-stopwords", help="print the pinned stopword list")
    s.set_defaults(func=cmd_print_stopwords)
    return p


def _config(args) -> CliConfig:
    env = os.environ.get(CONFIG_ENV)
    cfg = CliConfig.from_file(env) if env else CliConfig()
    overrides = {}
    if args.graph:
        overrides["graph_path"] = args.graph
    if args.format:
        overrides["format"] = args.format
    if args.corpus:
        overrides["corpus_path"] = args.corpus
    return replace(cfg, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if getattr(args, "max_depth", None) is not None and args.max_depth < 0:
            raise ValidationError("--max-depth must be >= 0")
        return args.func(cfg, args)
    except DeletedClause as exc:
        _err(f"{exc} (tombstone {exc.tombstone})")
        return EXIT_DELETED
    except EmptyQuery as exc:
        _err(str(exc))
        return EXIT_EMPTY_QUERY
    except (NotFound, FileNotFoundError) as exc:
        _err(str(exc))
        return EXIT_IO
    except ClauseGraphError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_DOMAIN
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
