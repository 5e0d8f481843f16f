"""Language-neutral data model and the canonical callgraph.json serialization.

Everything here is immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field

from .errors import LanguageMismatchError, MalformedNameError, SchemaViolationError

SCHEMA_VERSION = 1

#: Member name used for the synthetic module/class scope caller.
TOPLEVEL = "<toplevel>"

#: Member name used for constructors in Java qualified names.
INIT = "<init>"

# Segments are bare identifiers plus the two synthetic member names above:
# no separators, parens, commas or whitespace.
_BAD_SEGMENT_CHARS = re.compile(r"[.:(),\s]")


class Language(enum.Enum):
    PYTHON = "python"
    JAVASCRIPT = "javascript"
    JAVA = "java"

    @classmethod
    def from_tag(cls, tag: str) -> "Language":
        try:
            return cls(tag)
        except ValueError:
            raise SchemaViolationError(f"unknown language tag: {tag!r}") from None


def _check_segment(seg: str) -> None:
    if not seg:
        raise MalformedNameError("empty name segment")
    if _BAD_SEGMENT_CHARS.search(seg):
        raise MalformedNameError(f"illegal characters in name segment {seg!r}")


@dataclass(frozen=True, order=True)
class QualifiedName:
    """Canonical identity of a function/method within a single-file program.

    Python/JavaScript names join segments with ``.`` and the first segment is
    the module name (filename without extension). Java names join the class
    path with ``.`` and separate the member with ``:``; constructors use the
    member name ``<init>`` and may carry a parameter-type signature.
    """

    language: Language = field(compare=False)
    segments: tuple[str, ...]
    signature: str | None = None

    def __post_init__(self):
        if not self.segments:
            raise MalformedNameError("qualified name needs at least one segment")
        for seg in self.segments:
            _check_segment(seg)
        if self.signature is not None and self.language is not Language.JAVA:
            raise MalformedNameError("signature is only meaningful for java names")

    @property
    def text(self) -> str:
        """Canonical text form; round-trips through parse_qualified_name."""
        if self.language is Language.JAVA:
            if len(self.segments) == 1:
                base = self.segments[0]
            else:
                base = ".".join(self.segments[:-1]) + ":" + self.segments[-1]
            if self.signature is not None:
                base += f"({self.signature})"
            return base
        return ".".join(self.segments)

    @property
    def member(self) -> str:
        return self.segments[-1]

    def is_toplevel(self) -> bool:
        return self.member == TOPLEVEL

    def strip_signature(self) -> "QualifiedName":
        if self.signature is None:
            return self
        return QualifiedName(self.language, self.segments, None)

    def __str__(self) -> str:
        return self.text


def toplevel_name(language: Language, module: str) -> QualifiedName:
    """The synthetic caller for module-scope (or static-initializer) code."""
    return QualifiedName(language, (module, TOPLEVEL))


def parse_qualified_name(text: str, language: Language) -> QualifiedName:
    """Parse the canonical text form of a qualified name.

    Java names may end with a parenthesized parameter-type signature, which is
    captured into the signature field. Raises MalformedNameError on empty
    input, separators illegal for the language, or empty segments.
    """
    text = text.strip()
    if not text:
        raise MalformedNameError("empty qualified name")

    if language is Language.JAVA:
        signature = None
        if text.endswith(")"):
            open_idx = text.find("(")
            if open_idx < 0:
                raise MalformedNameError(f"unbalanced signature in {text!r}")
            signature = text[open_idx + 1 : -1].strip()
            text = text[:open_idx]
        if text.count(":") > 1:
            raise MalformedNameError(f"multiple ':' separators in {text!r}")
        if ":" in text:
            class_path, member = text.split(":")
            segments = tuple(class_path.split(".")) + (member,)
        else:
            # Bare class name (the class-name-as-callee answer shape); a
            # dotted path without a member cannot round-trip, so reject it.
            segments = (text,)
        name = QualifiedName(Language.JAVA, segments, signature)
    else:
        if ":" in text or "(" in text or ")" in text:
            raise MalformedNameError(f"illegal separator for {language.value}: {text!r}")
        name = QualifiedName(language, tuple(text.split(".")))
    return name


@dataclass(frozen=True, order=True)
class CallEdge:
    """Directed caller -> callee edge; self-edges model recursion."""

    caller: QualifiedName
    callee: QualifiedName

    def __post_init__(self):
        if self.caller.language is not self.callee.language:
            raise LanguageMismatchError(
                f"edge endpoints disagree on language: "
                f"{self.caller.language.value} vs {self.callee.language.value}"
            )

    @property
    def language(self) -> Language:
        return self.caller.language


@dataclass(frozen=True)
class CallGraph:
    """Edge set E plus the function inventory F of one program."""

    language: Language
    program_id: str
    edges: frozenset[CallEdge]
    functions: frozenset[QualifiedName]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "functions", frozenset(self.functions))
        for edge in self.edges:
            if edge.language is not self.language:
                raise LanguageMismatchError(
                    f"edge {edge.caller.text}->{edge.callee.text} does not match "
                    f"graph language {self.language.value}"
                )
            for endpoint in (edge.caller, edge.callee):
                if self._is_local(endpoint) and endpoint not in self.functions:
                    raise SchemaViolationError(
                        f"edge endpoint {endpoint.text} missing from functions"
                    )

    def _is_local(self, name: QualifiedName) -> bool:
        # Local means the module segment is this program's module (the program
        # id). Java names carry no module segment, so the containment rule is
        # enforced downstream where the inventory is known (trace executor),
        # not here; predicted java graphs may cite out-of-file class names.
        if self.language is Language.JAVA:
            return False
        return name.segments[0] == self.program_id

    @property
    def callers(self) -> frozenset[QualifiedName]:
        return frozenset(e.caller for e in self.edges)


@dataclass(frozen=True)
class ProgramInstance:
    """One harnessed single-file program."""

    program_id: str
    language: Language
    source: str
    repo: str
    loc: int
    ground_truth: CallGraph | None = None

    def __post_init__(self):
        actual = count_loc(self.source)
        if self.loc != actual:
            raise SchemaViolationError(
                f"{self.program_id}: loc={self.loc} but source has {actual} non-empty lines"
            )
        if self.loc < 1:
            raise SchemaViolationError(f"{self.program_id}: empty program")

    @classmethod
    def create(
        cls,
        program_id: str,
        language: Language,
        source: str,
        repo: str,
        ground_truth: CallGraph | None = None,
    ) -> "ProgramInstance":
        return cls(program_id, language, source, repo, count_loc(source), ground_truth)


def count_loc(source: str) -> int:
    """Non-empty (any non-whitespace character) newline-delimited lines."""
    return sum(1 for line in source.splitlines() if line.strip())


class Split(enum.Enum):
    TRAIN = "train"
    TEST = "test"


@dataclass(frozen=True)
class SplitAssignment:
    repo: str
    split: Split


def serialize_callgraph(graph: CallGraph) -> bytes:
    """Canonical callgraph.json bytes: stable key order, sorted names, LF,
    UTF-8, two-space indent. Equal graphs serialize to identical bytes.
    """
    by_caller: dict[str, list[str]] = {}
    for edge in graph.edges:
        by_caller.setdefault(edge.caller.text, []).append(edge.callee.text)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "program_id": graph.program_id,
        "language": graph.language.value,
        "functions": sorted(name.text for name in graph.functions),
        "edges": {caller: sorted(callees) for caller, callees in sorted(by_caller.items())},
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise SchemaViolationError(f"duplicate key {key!r} in callgraph json")
        seen[key] = value
    return seen


def deserialize_callgraph(data: bytes) -> CallGraph:
    """Inverse of serialize_callgraph; tolerant of key order and whitespace."""
    try:
        doc = json.loads(data.decode("utf-8"), object_pairs_hook=_reject_duplicate_keys)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaViolationError(f"not valid UTF-8 JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolationError("callgraph json must be an object")
    for fieldname in ("schema_version", "program_id", "language", "functions", "edges"):
        if fieldname not in doc:
            raise SchemaViolationError(f"missing field {fieldname!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaViolationError(f"unsupported schema_version {doc['schema_version']!r}")
    language = Language.from_tag(doc["language"])
    if not isinstance(doc["program_id"], str):
        raise SchemaViolationError("program_id must be a string")
    if not isinstance(doc["functions"], list) or not isinstance(doc["edges"], dict):
        raise SchemaViolationError("functions must be a list and edges an object")

    try:
        functions = [parse_qualified_name(t, language) for t in doc["functions"]]
    except (MalformedNameError, TypeError) as exc:
        raise SchemaViolationError(f"bad function name: {exc}") from exc
    if len(set(functions)) != len(functions):
        raise SchemaViolationError("duplicate entries in functions")

    edges = set()
    for caller_text, callee_texts in doc["edges"].items():
        if not isinstance(callee_texts, list):
            raise SchemaViolationError(f"callees of {caller_text!r} must be a list")
        try:
            caller = parse_qualified_name(caller_text, language)
            callees = [parse_qualified_name(t, language) for t in callee_texts]
        except (MalformedNameError, TypeError) as exc:
            raise SchemaViolationError(f"bad edge name: {exc}") from exc
        if len(set(callees)) != len(callees):
            raise SchemaViolationError(f"duplicate callee under caller {caller_text!r}")
        for callee in callees:
            edges.add(CallEdge(caller, callee))

    return CallGraph(language, doc["program_id"], frozenset(edges), frozenset(functions))


def edge_diff(
    predicted: CallGraph, gold: CallGraph
) -> tuple[frozenset[CallEdge], frozenset[CallEdge], frozenset[CallEdge]]:
    """(tp, fp, fn) between a predicted edge set and the ground truth."""
    if predicted.language is not gold.language:
        raise LanguageMismatchError(
            f"cannot diff {predicted.language.value} against {gold.language.value}"
        )
    tp = predicted.edges & gold.edges
    fp = predicted.edges - gold.edges
    fn = gold.edges - predicted.edges
    return tp, fp, fn
