"""On-disk corpus format: a ``corpus.json`` manifest plus one text file per document.

Each document file is UTF-8 text.  A line of the exact form ``== CLAUSE <id> ==``
opens a clause block; every following line up to the next header (or EOF)
is that clause's body.  If the first non-blank body line starts with ``## ``
it is stored as the clause heading.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotFound, ParseError, ValidationError

MANIFEST_NAME = "corpus.json"
NODE_SEPARATOR = "::"
HEADER_RE = re.compile(r"^== CLAUSE (?P<id>.+) ==$")
HEADING_PREFIX = "## "
MANIFEST_FIELDS = ("doc_id", "date", "description", "title", "file")


@dataclass(frozen=True)
class DocumentMeta:
    doc_id: str
    date: str  # ISO-8601 YYYY-MM-DD, kept verbatim so bad dates can be diagnosed
    description: str = ""
    title: str = ""

    @property
    def day(self) -> dt.date:
        return dt.date.fromisoformat(self.date)


@dataclass(frozen=True)
class ClauseBlock:
    clause_id: str
    body: str
    heading: str = ""


@dataclass(frozen=True)
class Document:
    meta: DocumentMeta
    clauses: tuple[ClauseBlock, ...]
    file: str = ""

    @property
    def doc_id(self) -> str:
        return self.meta.doc_id


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...] = field(default_factory=tuple)

    def __iter__(self):
        return iter(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, doc_id: str) -> Document | None:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        return None


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.location}: {self.message}"


def validate_corpus(corpus: Corpus) -> list[Diagnostic]:
    """Check corpus invariants; returns an empty list when everything holds."""
    diags: list[Diagnostic] = []

    def error(location: str, message: str) -> None:
        diags.append(Diagnostic(Severity.ERROR, location, message))

    if not corpus.documents:
        error("<corpus>", "corpus contains no documents")

    seen: set[str] = set()
    for i, doc in enumerate(corpus.documents):
        doc_id = doc.meta.doc_id
        loc = doc_id or f"<document #{i}>"
        if not doc_id:
            error(loc, "empty doc_id")
        elif NODE_SEPARATOR in doc_id:
            error(loc, f"doc_id {doc_id!r} contains reserved separator '::'")
        if doc_id in seen:
            error(loc, f"duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        try:
            doc.meta.day
        except (TypeError, ValueError):
            error(loc, f"invalid date {doc.meta.date!r} (expected YYYY-MM-DD)")

        clause_ids: set[str] = set()
        for clause in doc.clauses:
            cloc = f"{loc}{NODE_SEPARATOR}{clause.clause_id}"
            if not clause.clause_id.strip():
                error(cloc, "empty clause_id")
            elif NODE_SEPARATOR in clause.clause_id:
                error(cloc, "clause_id contains reserved separator '::'")
            if clause.clause_id in clause_ids:
                error(cloc, f"duplicate clause_id {clause.clause_id!r}")
            clause_ids.add(clause.clause_id)
            if not clause.body.strip():
                error(cloc, "clause body is empty")
    return diags


def parse_document_text(text: str, file: str = "<string>") -> tuple[ClauseBlock, ...]:
    blocks: list[ClauseBlock] = []
    current_id: str | None = None
    current_lines: list[str] = []

    def flush() -> None:
        if current_id is None:
            return
        lines = list(current_lines)
        while lines and not lines[0].strip():
            lines.pop(0)
        heading = ""
        if lines and lines[0].startswith(HEADING_PREFIX):
            heading = lines.pop(0)[len(HEADING_PREFIX):].strip()
        blocks.append(ClauseBlock(current_id, "\n".join(lines).strip(), heading))

    for lineno, line in enumerate(text.splitlines(), start=1):
        m = HEADER_RE.match(line)
        if m:
            flush()
            current_id = m.group("id")
            current_lines = []
        elif current_id is None:
            if line.strip():
                raise ParseError("text before the first clause header", file, lineno)
        else:
            current_lines.append(line)
    flush()
    return tuple(blocks)


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def _parse_manifest(text: str, file: str) -> list[tuple[dict, int]]:
    """Decode the manifest array, remembering the line where each entry starts."""
    decoder = json.JSONDecoder()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, file, exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("manifest must be a JSON array of document entries", file, 1)

    entries: list[tuple[dict, int]] = []
    pos = text.index("[") + 1
    ws = re.compile(r"[\s,]*")
    for _ in data:
        pos = ws.match(text, pos).end()
        entry, end = decoder.raw_decode(text, pos)
        entries.append((entry, _line_of(text, pos)))
        pos = end
    for entry, line in entries:
        if not isinstance(entry, dict):
            raise ParseError("manifest entry must be an object", file, line)
        missing = [k for k in ("doc_id", "date", "file") if k not in entry]
        if missing:
            raise ParseError(f"manifest entry missing {', '.join(missing)}", file, line)
        for key in MANIFEST_FIELDS:
            if key in entry and not isinstance(entry[key], str):
                raise ParseError(f"manifest field {key!r} must be a string", file, line)
    return entries


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus directory (or a path to its manifest).

    Raises NotFound, ParseError or ValidationError.
    """
    path = Path(path)
    if not path.exists():
        raise NotFound(f"corpus path not found: {path}")
    manifest = path / MANIFEST_NAME if path.is_dir() else path
    if not manifest.is_file():
        raise NotFound(f"corpus manifest not found: {manifest}")
    root = manifest.parent

    text = manifest.read_text(encoding="utf-8")
    documents = []
    for entry, line in _parse_manifest(text, str(manifest)):
        doc_file = root / entry["file"]
        if not doc_file.is_file():
            raise NotFound(f"{manifest}:{line}: document file not found: {doc_file}")
        clauses = parse_document_text(doc_file.read_text(encoding="utf-8"), str(doc_file))
        meta = DocumentMeta(
            doc_id=entry["doc_id"],
            date=entry["date"],
            description=entry.get("description", ""),
            title=entry.get("title", ""),
        )
        documents.append(Document(meta, clauses, entry["file"]))

    corpus = Corpus(tuple(documents))
    diags = [d for d in validate_corpus(corpus) if d.severity is Severity.ERROR]
    if diags:
        raise ValidationError("; ".join(str(d) for d in diags), diags)
    return corpus


def format_document(doc: Document) -> str:
    parts = []
    for clause in doc.clauses:
        lines = [f"== CLAUSE {clause.clause_id} =="]
        if clause.heading:
            lines.append(HEADING_PREFIX + clause.heading)
        lines.append(clause.body)
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> Path:
    """Write ``corpus`` as a corpus directory; inverse of :func:`load_corpus`."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, doc in enumerate(corpus.documents):
        file = doc.file or f"doc_{i:03d}.txt"
        entries.append(
            {
                "doc_id": doc.meta.doc_id,
                "date": doc.meta.date,
                "title": doc.meta.title,
                "description": doc.meta.description,
                "file": file,
            }
        )
        (root / file).write_text(format_document(doc), encoding="utf-8")
    (root / MANIFEST_NAME).write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
    return root


def fixture_corpus_path() -> Path:
    """Directory of the bundled three-document sample corpus."""
    return Path(__file__).parent / "fixtures" / "sample_corpus"
