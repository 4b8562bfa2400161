"""Keyword-overlap scoring and the graph-vs-lexical benchmark harness."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .crawler import DEFAULT_MAX_DEPTH, answer_text, render_context, resolve_and_crawl
from .errors import NotFound, ParseError, UnresolvedEntry, ValidationError
from .graph import KnowledgeGraph
from .retrieval import LexicalIndex, select_entry, tokenize, top_k

DEFAULT_THRESHOLD = 0.5
BACKENDS = ("baseline", "kg")


def keywords(text: str) -> frozenset[str]:
    """Unique meaningful words of ``text``."""
    return frozenset(tokenize(text))


def overlap_coefficient(answer: str, source: str) -> float:
    """Share of the answer's keywords that also appear in the source.

    Returns 0.0 when the answer has no keywords.
    """
    a = keywords(answer)
    if not a:
        return 0.0
    return len(a & keywords(source)) / len(a)


class Category(enum.Enum):
    CORRECT = "Correct"
    INCOMPLETE = "Incomplete"
    REFUSAL = "Refusal"


TABLE_ROWS = {
    Category.CORRECT: "Correct/Complete Answers",
    Category.INCOMPLETE: "Incomplete/Inaccurate",
    Category.REFUSAL: "Refusals/No Answer",
}


def categorize(score: float, answered: bool, threshold: float = DEFAULT_THRESHOLD) -> Category:
    if not answered:
        return Category.REFUSAL
    return Category.CORRECT if score >= threshold else Category.INCOMPLETE


@dataclass(frozen=True)
class BenchQuestion:
    id: str
    question: str
    golden_snippet: str
    required_keywords: tuple[str, ...]
    entry_hint: str | None = None

    def __post_init__(self):
        if not self.golden_snippet.strip():
            raise ValidationError(f"question {self.id!r}: golden_snippet is empty")
        if not self.required_keywords:
            raise ValidationError(f"question {self.id!r}: required_keywords is empty")


def load_bench(path: str | Path) -> list[BenchQuestion]:
    """Read a benchmark file: a non-empty JSON array of question objects."""
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"bench file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, str(path), exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("bench file must hold a JSON array", str(path))
    if not data:
        raise ValidationError(f"{path}: bench file has no questions")
    questions = []
    for i, q in enumerate(data):
        try:
            questions.append(
                BenchQuestion(
                    id=str(q["id"]),
                    question=q["question"],
                    golden_snippet=q["golden_snippet"],
                    required_keywords=tuple(q["required_keywords"]),
                    entry_hint=q.get("entry_hint") or None,
                )
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"question #{i}: missing or malformed field {exc}", str(path)) from None
    ids = [q.id for q in questions]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"{path}: duplicate question ids")
    return questions


@dataclass
class QuestionResult:
    id: str
    question: str
    baseline_node: str | None
    kg_entry: str | None
    baseline_answer: str
    kg_answer: str
    kg_context: str
    baseline_score: float
    kg_score: float
    baseline_category: Category
    kg_category: Category
    kg_deleted: bool = False

    def missing_keywords(self, required, backend: str) -> list[str]:
        have = keywords(self.kg_answer if backend == "kg" else self.baseline_answer)
        return [k for k in required if k.lower() not in have]


@dataclass
class EvalReport:
    threshold: float
    max_depth: int
    results: list[QuestionResult] = field(default_factory=list)

    @property
    def tallies(self) -> dict[str, dict[str, int]]:
        out = {b: {c.value: 0 for c in Category} for b in BACKENDS}
        for r in self.results:
            out["baseline"][r.baseline_category.value] += 1
            out["kg"][r.kg_category.value] += 1
        return out

    def mean_score(self, backend: str) -> float:
        if not self.results:
            return 0.0
        attr = "kg_score" if backend == "kg" else "baseline_score"
        return sum(getattr(r, attr) for r in self.results) / len(self.results)

    def result(self, question_id: str) -> QuestionResult:
        for r in self.results:
            if r.id == question_id:
                return r
        raise KeyError(question_id)

    def to_dict(self) -> dict:
        results = []
        for r in self.results:
            d = asdict(r)
            d["baseline_category"] = r.baseline_category.value
            d["kg_category"] = r.kg_category.value
            results.append(d)
        return {
            "threshold": self.threshold,
            "max_depth": self.max_depth,
            "question_count": len(self.results),
            "tallies": self.tallies,
            "mean_score": {b: self.mean_score(b) for b in BACKENDS},
            "results": results,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        """Three-row comparison table (plus total), one column per backend."""
        n = len(self.results)
        t = self.tallies

        def cell(count: int) -> str:
            pct = 100.0 * count / n if n else 0.0
            return f"{count} ({pct:.0f}%)"

        rows = [("Metric", "Lexical Baseline", "Knowledge Graph")]
        for cat, label in TABLE_ROWS.items():
            rows.append((label, cell(t["baseline"][cat.value]), cell(t["kg"][cat.value])))
        rows.append(("Total Questions", str(n), str(n)))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [f"# correct threshold: {self.threshold:g}"]
        for i, r in enumerate(rows):
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["id", "baseline_node", "kg_entry", "baseline_score", "kg_score",
             "baseline_category", "kg_category"]
        )
        for r in self.results:
            writer.writerow(
                [r.id, r.baseline_node or "", r.kg_entry or "", f"{r.baseline_score:.4f}",
                 f"{r.kg_score:.4f}", r.baseline_category.value, r.kg_category.value]
            )
        return buf.getvalue()


def evaluate_question(
    graph: KnowledgeGraph,
    index: LexicalIndex,
    q: BenchQuestion,
    max_depth: int = DEFAULT_MAX_DEPTH,
    threshold: float = DEFAULT_THRESHOLD,
) -> QuestionResult:
    hits = top_k(index, q.question, k=1)
    baseline_node = hits[0].node if hits else None
    baseline_answer = graph.nodes[baseline_node].content if baseline_node else ""

    if q.entry_hint:
        if q.entry_hint not in graph:
            raise UnresolvedEntry(f"question {q.id!r}: entry_hint {q.entry_hint!r} is not in the graph")
        entry = q.entry_hint
    else:
        entry = select_entry(graph, index, q.question)

    kg_answer = kg_context = ""
    deleted = False
    if entry is not None:
        trace = resolve_and_crawl(graph, entry, max_depth)
        kg_context = render_context(trace, graph)
        kg_answer = answer_text(trace, graph)
        deleted = trace.deleted

    b_score = overlap_coefficient(baseline_answer, q.golden_snippet)
    k_score = overlap_coefficient(kg_answer, q.golden_snippet)
    return QuestionResult(
        id=q.id,
        question=q.question,
        baseline_node=baseline_node,
        kg_entry=entry,
        baseline_answer=baseline_answer,
        kg_answer=kg_answer,
        kg_context=kg_context,
        baseline_score=b_score,
        kg_score=k_score,
        baseline_category=categorize(b_score, bool(keywords(baseline_answer)), threshold),
        kg_category=categorize(k_score, bool(keywords(kg_answer)), threshold),
        kg_deleted=deleted,
    )


def run_benchmark(
    graph: KnowledgeGraph,
    index: LexicalIndex,
    questions: list[BenchQuestion],
    max_depth: int = DEFAULT_MAX_DEPTH,
    threshold: float = DEFAULT_THRESHOLD,
) -> EvalReport:
    """Score the lexical top-1 baseline and the graph crawl on every question.

    The graph backend is scored on its extractive answer (valid clause text
    from the crawl); the rendered context is kept on each result.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    results = [evaluate_question(graph, index, q, max_depth, threshold) for q in questions]
    results.sort(key=lambda r: r.id)
    return EvalReport(threshold=threshold, max_depth=max_depth, results=results)
