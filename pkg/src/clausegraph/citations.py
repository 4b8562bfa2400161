"""Rule-based extraction of clause citations and amendment directives.

The grammar is a handful of anchored keyword patterns plus a clause-id lexer
(digits, dots, optional parenthesised suffix such as ``4.8(g)``).  Document
ids are recognised as underscore-joined tokens (``Amendment_01_Vol2``,
``Drawing_17.3.1_Demarcation_Plan``).

Extraction sits behind :class:`ReferenceExtractor` so another implementation
(for example a model-backed one) can be swapped in; the graph builder only
accepts deterministic extractors.
"""

from __future__ import annotations

import enum
import json
import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field

from .errors import ExtractorUnavailable, ValidationError

WHOLE_DOCUMENT = "*"

CLAUSE_ID = r"\d+(?:\.\d+)*(?:\s?\([A-Za-z0-9]{1,4}\))?"
DOC_ID = r"[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+(?:\.[A-Za-z0-9]+)*)+"

# text that may sit between "refer to" and "Clause X" without leaving the sentence
_LEAD = r"(?:(?:(?!\.\s)[^.;:\n]){0,80}?\s)?"

_REFERENCE_PATTERNS: dict[str, re.Pattern] = {
    "refer_clause": re.compile(
        rf"\brefer(?:\s+to)?\s+{_LEAD}clauses?\s+(?P<id>{CLAUSE_ID})", re.I
    ),
    "refer_number": re.compile(rf"\brefer\s+to\s+(?P<id>{CLAUSE_ID})", re.I),
    "refer_document": re.compile(rf"\brefer\s+to\s+(?:the\s+)?(?P<doc>{DOC_ID})", re.I),
    "see": re.compile(
        rf"\bsee\s+(?:also\s+)?(?:clause\s+(?P<id>{CLAUSE_ID})|(?P<doc>{DOC_ID}))", re.I
    ),
    "in_accordance_with": re.compile(
        rf"\bin\s+accordance\s+with\s+(?:the\s+)?"
        rf"(?:clause\s+(?P<id>{CLAUSE_ID})|(?P<doc>{DOC_ID}))",
        re.I,
    ),
}

# "... of the Base Contract (Base_Contract_Vol1)", "as introduced in Amendment_01_Vol2"
_DOC_QUALIFIER = re.compile(
    rf"\s*,?\s*(?:of|in|as\s+introduced\s+in|as\s+amended\s+by)\s+"
    rf"(?:(?:(?!\.\s)[^.;:\n(]){{0,60}}?)\(?(?P<doc>{DOC_ID})\)?",
    re.I,
)
_DOC_ANYWHERE = re.compile(DOC_ID)
_SENTENCE_END = re.compile(r"\.(?=\s|$)|[;\n]")

_NOT_SENTENCE_END = r"(?:(?!\.\s)[^:])"
_REPLACE = re.compile(
    rf"\bdelete\s+(?:the\s+)?(?:revised\s+)?clause\s+(?P<target>{CLAUSE_ID})"
    rf"(?P<mid>{_NOT_SENTENCE_END}{{0,200}}?)\breplace\b{_NOT_SENTENCE_END}{{0,60}}?:"
    rf"(?:\s*(?:(?:revised|final|new|amended)\s+)?clause\s+(?P<repl>{CLAUSE_ID})\s*:)?",
    re.I,
)
_DELETE = re.compile(
    rf"\bdelete\s+(?:the\s+)?(?:revised\s+)?clause\s+(?P<target>{CLAUSE_ID})", re.I
)
_ADD = re.compile(
    rf"\badd\s+(?:new\s+clause\s+(?P<id>{CLAUSE_ID})"
    rf"|the\s+following\s+(?:sub)?section\s*:\s*clause\s+(?P<id2>{CLAUSE_ID}))"
    rf"(?:(?P<dest>[^:.\n]{{0,80}}?)\s*:(?:\s*clause\s+(?P<label>{CLAUSE_ID})\s*:)?)?",
    re.I,
)


def normalize_clause_id(raw: str) -> str:
    """``"4.8 (a)"`` -> ``"4.8(a)"``."""
    return re.sub(r"\s+", "", raw)


@dataclass(frozen=True)
class ClauseReference:
    target_document_name: str  # "" means the citing document
    target_section_id: str  # WHOLE_DOCUMENT for drawings and other whole-document targets
    span: tuple[int, int]
    surface_text: str
    pattern: str = ""  # which grammar rule fired

    def __post_init__(self):
        if not self.target_section_id:
            raise ValueError("target_section_id must be non-empty")
        if self.span[0] > self.span[1]:
            raise ValueError(f"bad span {self.span}")


@dataclass(frozen=True)
class ExtractionResult:
    has_references: bool
    references: tuple[ClauseReference, ...] = ()

    @classmethod
    def of(cls, references) -> "ExtractionResult":
        refs = tuple(references)
        return cls(bool(refs), refs)


class DirectiveKind(enum.Enum):
    REPLACE_CLAUSE = "ReplaceClause"
    DELETE_CLAUSE = "DeleteClause"
    ADD_CLAUSE = "AddClause"
    REFERENCE = "Reference"


@dataclass(frozen=True)
class Directive:
    kind: DirectiveKind
    source_doc: str
    source_clause: str
    target_document: str
    target_section: str
    replacement_section: str = ""
    span: tuple[int, int] = (0, 0)
    surface_text: str = ""
    # where the introduced clause text lives, for Replace/Add
    content_span: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        needs_replacement = self.kind in (DirectiveKind.REPLACE_CLAUSE, DirectiveKind.ADD_CLAUSE)
        if needs_replacement and not self.replacement_section:
            raise ValueError(f"{self.kind.value} requires a replacement_section")
        if not needs_replacement and self.replacement_section:
            raise ValueError(f"{self.kind.value} must not carry a replacement_section")


def check_extraction(result: ExtractionResult, text: str) -> ExtractionResult:
    """Raise ValidationError if ``result`` breaks the ExtractionResult contract."""
    if result.has_references != bool(result.references):
        raise ValidationError(
            f"has_references={result.has_references} but {len(result.references)} references returned"
        )
    for ref in result.references:
        start, end = ref.span
        if not (0 <= start <= end <= len(text)):
            raise ValidationError(f"reference span {ref.span} outside text bounds")
        if text[start:end] != ref.surface_text:
            raise ValidationError(f"surface_text {ref.surface_text!r} does not match span {ref.span}")
        if not ref.target_section_id:
            raise ValidationError("reference with empty target_section_id")
    return result


def _sentence_end(text: str, pos: int) -> int:
    m = _SENTENCE_END.search(text, pos)
    return m.start() if m else len(text)


def _qualifier_doc(text: str, pos: int) -> tuple[str, int]:
    """Document named right after a clause id, and where the qualifier ends."""
    m = _DOC_QUALIFIER.match(text, pos)
    if m and m.end() <= _sentence_end(text, pos) + 1:
        return m.group("doc"), m.end()
    return "", pos


def _leading_doc(text: str, pos: int) -> str:
    """Last document id between the previous sentence end and ``pos``."""
    start = 0
    for m in _SENTENCE_END.finditer(text, 0, pos):
        start = m.end()
    docs = _DOC_ANYWHERE.findall(text, start, pos)
    return docs[-1] if docs else ""


def _same_doc(doc: str, current_doc: str) -> str:
    return "" if doc == current_doc else doc


def extract_references(text: str, current_doc: str = "") -> ExtractionResult:
    """Find citation phrases ("refer to Clause X", "see X", "in accordance with X", ...)."""
    candidates: list[tuple[int, int, str, re.Match]] = []
    for name, pattern in _REFERENCE_PATTERNS.items():
        for m in pattern.finditer(text):
            candidates.append((m.start(), -(m.end() - m.start()), name, m))
    candidates.sort(key=lambda c: (c[0], c[1]))

    refs: list[ClauseReference] = []
    taken_until = -1
    for start, _, name, m in candidates:
        if start < taken_until:
            continue
        taken_until = m.end()
        doc = m.groupdict().get("doc")
        if doc:
            section = WHOLE_DOCUMENT
        else:
            section = normalize_clause_id(m.group("id"))
            doc, _ = _qualifier_doc(text, m.end())
        refs.append(
            ClauseReference(
                target_document_name=_same_doc(doc, current_doc),
                target_section_id=section,
                span=(m.start(), m.end()),
                surface_text=m.group(0),
                pattern=name,
            )
        )
    return ExtractionResult.of(refs)


class ReferenceExtractor:
    """Pluggable reference extraction.

    Subclasses implement :meth:`extract`; calling the instance validates the
    result against the ExtractionResult contract.
    """

    deterministic: bool = True
    name: str = "extractor"

    def extract(self, text: str, current_doc: str) -> ExtractionResult:
        raise NotImplementedError

    def __call__(self, text: str, current_doc: str = "") -> ExtractionResult:
        return check_extraction(self.extract(text, current_doc), text)


class RuleBasedExtractor(ReferenceExtractor):
    name = "rules"

    def extract(self, text: str, current_doc: str) -> ExtractionResult:
        return extract_references(text, current_doc)


class CallableExtractor(ReferenceExtractor):
    """Adapter for a plain function ``fn(text, current_doc) -> ExtractionResult``."""

    def __init__(self, fn, deterministic: bool = False, name: str = "callable"):
        self.fn = fn
        self.deterministic = deterministic
        self.name = name

    def extract(self, text: str, current_doc: str) -> ExtractionResult:
        return self.fn(text, current_doc)


class RemoteExtractor(ReferenceExtractor):
    """Extractor served over HTTP.

    POSTs ``{"text": ..., "current_doc": ...}`` as JSON and expects
    ``{"has_references": bool, "references": [{target_document_name,
    target_section_id, span, surface_text}, ...]}`` back.  Remote output is
    treated as non-deterministic.
    """

    deterministic = False
    name = "remote"

    def __init__(self, endpoint: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def extract(self, text: str, current_doc: str) -> ExtractionResult:
        if not self.endpoint:
            raise ExtractorUnavailable("no endpoint configured for remote extractor")
        body = json.dumps({"text": text, "current_doc": current_doc}).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise ExtractorUnavailable(f"remote extractor failed: {exc}") from exc
        refs = tuple(
            ClauseReference(
                target_document_name=r.get("target_document_name", ""),
                target_section_id=r["target_section_id"],
                span=tuple(r["span"]),
                surface_text=r["surface_text"],
                pattern=r.get("reasoning", "remote"),
            )
            for r in payload.get("references", [])
        )
        return ExtractionResult(bool(payload.get("has_references")), refs)


DEFAULT_EXTRACTOR = RuleBasedExtractor()


def _structural_candidates(text: str):
    for m in _REPLACE.finditer(text):
        yield DirectiveKind.REPLACE_CLAUSE, m
    for m in _DELETE.finditer(text):
        yield DirectiveKind.DELETE_CLAUSE, m
    for m in _ADD.finditer(text):
        yield DirectiveKind.ADD_CLAUSE, m


def parse_directives(
    text: str,
    source_doc: str,
    source_clause: str,
    extractor: ReferenceExtractor | None = None,
) -> list[Directive]:
    """Parse Replace/Delete/Add instructions and leftover references, ordered by span.

    Overlapping structural matches are resolved longest-match-first, scanning
    left to right, so "Delete X ... replace it with" wins over a bare "Delete X".
    """
    extractor = extractor or DEFAULT_EXTRACTOR

    candidates = sorted(
        _structural_candidates(text), key=lambda c: (c[1].start(), -(c[1].end() - c[1].start()))
    )
    accepted: list[tuple[DirectiveKind, re.Match]] = []
    taken_until = -1
    for kind, m in candidates:
        if m.start() < taken_until:
            continue
        accepted.append((kind, m))
        taken_until = m.end()

    structural: list[Directive] = []
    for i, (kind, m) in enumerate(accepted):
        span_end = m.end()
        if kind is DirectiveKind.ADD_CLAUSE:
            new_id = normalize_clause_id(m.group("label") or m.group("id") or m.group("id2"))
            target_doc, target_section = "", ""
        else:
            target_section = normalize_clause_id(m.group("target"))
            target_doc, qual_end = _qualifier_doc(text, m.end("target"))
            if kind is DirectiveKind.DELETE_CLAUSE and target_doc:
                span_end = qual_end
            if not target_doc:
                target_doc = _leading_doc(text, m.start())
            new_id = ""
            if kind is DirectiveKind.REPLACE_CLAUSE:
                new_id = normalize_clause_id(m.group("repl") or m.group("target"))

        content_span = None
        if kind is not DirectiveKind.DELETE_CLAUSE:
            next_start = accepted[i + 1][1].start() if i + 1 < len(accepted) else len(text)
            content_span = (span_end, next_start)

        structural.append(
            Directive(
                kind=kind,
                source_doc=source_doc,
                source_clause=source_clause,
                target_document=_same_doc(target_doc, source_doc),
                target_section=target_section,
                replacement_section=new_id,
                span=(m.start(), span_end),
                surface_text=text[m.start():span_end],
                content_span=content_span,
            )
        )

    refs = extractor(text, source_doc).references
    directives = list(structural)
    for ref in refs:
        start, end = ref.span
        if any(start < d.span[1] and d.span[0] < end for d in structural):
            continue
        directives.append(
            Directive(
                kind=DirectiveKind.REFERENCE,
                source_doc=source_doc,
                source_clause=source_clause,
                target_document=ref.target_document_name,
                target_section=ref.target_section_id,
                span=ref.span,
                surface_text=ref.surface_text,
            )
        )
    directives.sort(key=lambda d: d.span)
    return directives


def introduced_text(text: str, directive: Directive) -> str:
    """The clause text a Replace/Add directive introduces, trimmed."""
    if directive.content_span is None:
        return ""
    start, end = directive.content_span
    return text[start:end].strip()
