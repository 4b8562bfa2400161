from __future__ import annotations

import json
import os
import shutil
import subprocess
import sys

import pytest

from clausegraph.cli import CONFIG_ENV, CliConfig, main
from clausegraph.corpus import fixture_corpus_path
from clausegraph.errors import ValidationError
from clausegraph.graph import load_graph

from conftest import AMEND, BASE, DRAWING, TENDER

ERSS_QUESTION = (
    "How should we construct the ERSS for the station box, and where can I find "
    "the exact boundary measurements for Entrances 1 and 3?"
)


@pytest.fixture(scope="module")
def graph_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "graph.json"
    assert main(["--graph", str(path), "build", str(fixture_corpus_path())]) == 0
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_summary(tmp_path, capsys):
    code, out, err = run(capsys, "--graph", str(tmp_path / "g.json"), "build", str(fixture_corpus_path()))
    assert code == 0 and out == ""
    assert "Document=3" in err and "SUPERSEDES=3" in err


def test_build_json(tmp_path, capsys):
    code, out, _ = run(capsys, "--graph", str(tmp_path / "g.json"), "--format", "json",
                       "--corpus", str(fixture_corpus_path()), "build")
    assert code == 0
    summary = json.loads(out)
    assert summary["nodes"]["Document"] == 3 and summary["edges"]["SUPERSEDES"] == 3


def test_build_missing_corpus(tmp_path, capsys):
    code, _, err = run(capsys, "--graph", str(tmp_path / "g.json"), "build", str(tmp_path / "none"))
    assert code == 2 and "not found" in err


def test_build_duplicate_doc_id(tmp_path, capsys):
    root = tmp_path / "dup"
    root.mkdir()
    (root / "a.txt").write_text("== CLAUSE 1 ==\nx\n")
    entries = [{"doc_id": "A", "date": "2020-01-01", "file": "a.txt"}] * 2
    (root / "corpus.json").write_text(json.dumps(entries))
    code, _, err = run(capsys, "--graph", str(tmp_path / "g.json"), "build", str(root))
    assert code == 1 and "ValidationError" in err


def test_resolve_grade(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "resolve", f"{BASE}::4.2")
    assert code == 0
    assert out.rstrip().endswith("Retaining walls not attached to the station box may remain at Grade 30.")
    assert "Grade 40 Concrete (High Strength)" in out.strip().splitlines()[-1]


def test_resolve_deleted(graph_file, capsys):
    code, _, err = run(capsys, "--graph", graph_file, "resolve", f"{AMEND}::4.8(a)")
    assert code == 3 and f"{TENDER}::4.8(a)" in err


def test_resolve_unknown(graph_file, capsys):
    assert run(capsys, "--graph", graph_file, "resolve", "Nope::1")[0] == 1


def test_resolve_json(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "--format", "json", "resolve", f"{BASE}::4.2")
    data = json.loads(out)
    assert code == 0 and data["valid"] == f"{TENDER}::4.2" and len(data["chain"]) == 3


def test_crawl(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "crawl", f"{TENDER}::4.8(g)")
    assert code == 0 and DRAWING in out
    code, out, err = run(capsys, "--graph", graph_file, "crawl", f"{TENDER}::4.8(g)", "--max-depth", "1")
    assert code == 0 and f"[{DRAWING} *]" not in out and "max depth" in err


def test_query_erss_with_entry(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "query", ERSS_QUESTION, "--entry", f"{TENDER}::4.8(g)")
    assert code == 0
    for s in ("Diaphragm", "1200mm", DRAWING):
        assert s in out


def test_query_grade(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "query",
                       "What grade of concrete must I use for the permanent station box?")
    assert code == 0 and "Grade 40" in out
    context = out.split("\n\n", 1)[1]
    for block in context.split("\n\n"):
        if "Grade 25" in block:
            assert "[SUPERSEDED]" in block


def test_query_grade_from_stale_entry(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "query", "concrete grade", "--entry", f"{BASE}::4.2")
    assert code == 0
    grade25 = [b for b in out.split("\n\n") if "Grade 25" in b]
    assert grade25 and all("[SUPERSEDED]" in b for b in grade25)


def test_query_json(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "--format", "json", "query", "curing time", "--k", "2")
    data = json.loads(out)
    assert code == 0 and len(data["hits"]) == 2 and data["hops"][0]["node"] == data["entry"]


def test_query_stopwords_only(graph_file, capsys):
    assert run(capsys, "--graph", graph_file, "query", "the of and")[0] == 4


def test_bench_table(graph_file, capsys, tmp_path):
    out_json, out_csv = tmp_path / "r.json", tmp_path / "r.csv"
    code, out, _ = run(capsys, "--graph", graph_file, "bench", "--out", str(out_json), "--csv", str(out_csv))
    assert code == 0 and "Correct/Complete Answers" in out
    report = json.loads(out_json.read_text())
    assert report["tallies"]["kg"]["Correct"] >= report["tallies"]["baseline"]["Correct"]
    assert out_csv.read_text().startswith("id,")


def test_bench_threshold_zero(graph_file, capsys):
    code, out, _ = run(capsys, "--graph", graph_file, "--format", "json", "bench", "--threshold", "0")
    for r in json.loads(out)["results"]:
        if r["kg_answer"]:
            assert r["kg_category"] == "Correct"
        if r["baseline_answer"]:
            assert r["baseline_category"] == "Correct"


def test_bench_empty_file(graph_file, capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("[]")
    assert run(capsys, "--graph", graph_file, "bench", str(empty))[0] == 1


def test_export_dot(graph_file, capsys, tmp_path):
    out = tmp_path / "g.dot"
    assert run(capsys, "--graph", graph_file, "export-dot", str(out))[0] == 0
    text = out.read_text()
    assert text.startswith("digraph")
    node_lines = [l for l in text.splitlines() if l.strip().startswith('"') and "->" not in l]
    assert len(node_lines) == len(load_graph(graph_file))


def test_export_dot_unwritable(graph_file, capsys, tmp_path):
    assert run(capsys, "--graph", graph_file, "export-dot", str(tmp_path / "no" / "dir" / "g.dot"))[0] == 2


def test_missing_graph_file(capsys, tmp_path):
    assert run(capsys, "--graph", str(tmp_path / "none.json"), "resolve", f"{BASE}::4.2")[0] == 2


def test_print_stopwords(capsys):
    code, out, _ = run(capsys, "print-stopwords")
    assert code == 0 and "the" in out.split()


def test_commands_do_not_touch_graph_file(graph_file, capsys, tmp_path):
    before = open(graph_file, "rb").read()
    run(capsys, "--graph", graph_file, "query", "curing time")
    run(capsys, "--graph", graph_file, "bench")
    run(capsys, "--graph", graph_file, "export-dot", str(tmp_path / "x.dot"))
    assert open(graph_file, "rb").read() == before


def test_config_from_environment(graph_file, capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph_path": graph_file, "format": "json"}))
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    code, out, _ = run(capsys, "resolve", f"{BASE}::4.5")
    assert code == 0 and json.loads(out)["valid"] == f"{BASE}::4.5"


def test_config_rejects_bad_values(tmp_path, capsys, monkeypatch):
    with pytest.raises(ValidationError):
        CliConfig(max_depth=-1)
    with pytest.raises(ValidationError):
        CliConfig(top_k=0)
    with pytest.raises(ValidationError):
        CliConfig(correct_threshold=2.0)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    assert run(capsys, "print-stopwords")[0] == 1


@pytest.mark.skipif(shutil.which("clausegraph") is None, reason="console script not installed")
def test_console_script(graph_file):
    proc = subprocess.run(
        ["clausegraph", "--graph", graph_file, "resolve", f"{BASE}::4.2"],
        capture_output=True, text=True, env={**os.environ, "PYTHONIOENCODING": "utf-8"},
    )
    assert proc.returncode == 0 and "Grade 40" in proc.stdout


def test_module_entry(graph_file):
    proc = subprocess.run(
        [sys.executable, "-m", "clausegraph.cli", "--graph", graph_file, "resolve", f"{AMEND}::4.8(a)"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 3
