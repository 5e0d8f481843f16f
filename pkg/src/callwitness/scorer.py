"""Edge-level scoring: prompt rendering, answer parsing, metrics, aggregation.

A prediction is a set of caller -> callee edges reconstructed from numbered
answer lines ("3. main.f, main.g" claims edges from the third listed
caller). Java names are compared with signatures stripped on both sides,
since the answer format never asks for parameter types.

Aggregation is two-level: within a language, tp/fp/fn pool across programs
(micro) or per-program ratios average (macro, selectable); across languages
the overall number is always the unweighted mean of the per-language values.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MalformedNameError, MissingGroundTruthError
from .prompts import (
    DISPLAY_NAMES,
    EVAL_SYSTEM_TEMPLATE,
    EVAL_USER_TEMPLATE,
    QUESTION_TEMPLATE,
    WORKED_EXAMPLES,
)
from .schema import (
    CallEdge,
    CallGraph,
    Language,
    ProgramInstance,
    QualifiedName,
    edge_diff,
    parse_qualified_name,
)


@dataclass(frozen=True)
class Metrics:
    """Precision/recall/F1 with the raw counts they came from.

    Counts are zero when the values were reported externally rather than
    computed from an edge comparison (see from_ratios).
    """

    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    def __post_init__(self):
        for name in ("tp", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("precision", "recall", "f1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "Metrics":
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        return cls(tp, fp, fn, precision, recall, f1)

    @classmethod
    def from_ratios(cls, precision: float, recall: float, f1: float) -> "Metrics":
        return cls(0, 0, 0, precision, recall, f1)


@dataclass(frozen=True)
class AnswerSheet:
    """Parsed model answers: question index -> claimed callee set.

    dropped records callee strings that failed name parsing; they denote
    no edge and are excluded from scoring, but kept for diagnostics.
    """

    program_id: str
    per_caller: dict[int, frozenset[QualifiedName]]
    dropped: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(
            self,
            "per_caller",
            {i: frozenset(v) for i, v in self.per_caller.items()},
        )
        object.__setattr__(self, "dropped", tuple(self.dropped))
        indices = sorted(self.per_caller)
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"question indices {indices} are not contiguous from 1")


def question_callers(gold: CallGraph) -> list[QualifiedName]:
    """Distinct gold callers in canonical (sorted text) order.

    Java callers lose their signatures here: the answer format never shows
    parameter types, so two overloads collapse into one question.
    """
    callers = {c.strip_signature() for c in gold.callers}
    return sorted(callers, key=lambda n: n.text)


def render_eval_prompt(instance: ProgramInstance) -> tuple[str, str, list[QualifiedName]]:
    """Fill the evaluation template; returns (system, user, caller order)."""
    if instance.ground_truth is None:
        raise MissingGroundTruthError(
            f"{instance.program_id}: cannot render questions without ground truth"
        )
    language = DISPLAY_NAMES[instance.language]
    callers = question_callers(instance.ground_truth)
    questions = "\n".join(
        QUESTION_TEMPLATE.format(index=i, caller=caller.text)
        for i, caller in enumerate(callers, 1)
    )
    system_text = EVAL_SYSTEM_TEMPLATE.format(language=language)
    user_text = EVAL_USER_TEMPLATE.format(
        language=language,
        example=WORKED_EXAMPLES[instance.language],
        code=instance.source,
        questions=questions,
    )
    return system_text, user_text, callers


_ANSWER_LINE = re.compile(r"^\s*(\d+)[.)]\s*(.*?)\s*$")


def _clean_token(token: str) -> str:
    return token.strip().strip("`")


def parse_answer(
    text: str,
    callers: list[QualifiedName],
    language: Language,
    program_id: str = "",
) -> AnswerSheet:
    """Extract numbered answer lines; tolerant of preamble and trailers.

    First occurrence of an index wins; indices outside 1..len(callers) are
    ignored; unparseable names are dropped into the diagnostics tally.
    """
    if not callers:
        raise ValueError("callers must be non-empty")
    found: dict[int, set[QualifiedName]] = {}
    dropped: list[str] = []
    for line in text.splitlines():
        match = _ANSWER_LINE.match(line)
        if not match:
            continue
        index = int(match.group(1))
        if not 1 <= index <= len(callers) or index in found:
            continue
        names: set[QualifiedName] = set()
        for token in match.group(2).split(","):
            token = _clean_token(token)
            if not token:
                continue
            try:
                names.add(parse_qualified_name(token, language))
            except MalformedNameError:
                dropped.append(token)
        found[index] = names
    per_caller = {
        i: frozenset(found.get(i, set())) for i in range(1, len(callers) + 1)
    }
    return AnswerSheet(program_id, per_caller, tuple(dropped))


def _stripped_gold(gold: CallGraph) -> CallGraph:
    """Signature-free copy of a java graph; other languages pass through."""
    if gold.language is not Language.JAVA:
        return gold
    edges = frozenset(
        CallEdge(e.caller.strip_signature(), e.callee.strip_signature())
        for e in gold.edges
    )
    functions = frozenset(n.strip_signature() for n in gold.functions)
    return CallGraph(gold.language, gold.program_id, edges, functions)


def score_program(
    answers: AnswerSheet, gold: CallGraph, callers: list[QualifiedName]
) -> Metrics:
    """Compare the claimed edge set against the ground truth."""
    if len(callers) != len(answers.per_caller):
        raise ValueError(
            f"answer sheet has {len(answers.per_caller)} questions "
            f"but {len(callers)} callers were asked"
        )
    edges = set()
    for i, caller in enumerate(callers, 1):
        for callee in answers.per_caller[i]:
            edges.add(CallEdge(caller.strip_signature(), callee.strip_signature()))
    endpoints = {e.caller for e in edges} | {e.callee for e in edges}
    predicted = CallGraph(gold.language, gold.program_id, frozenset(edges), endpoints)
    tp, fp, fn = edge_diff(predicted, _stripped_gold(gold))
    return Metrics.from_counts(len(tp), len(fp), len(fn))


def answers_from_gold(
    gold: CallGraph, callers: list[QualifiedName], program_id: str = ""
) -> AnswerSheet:
    """The perfect answer sheet a gold-reading oracle would produce."""
    per_caller: dict[int, frozenset[QualifiedName]] = {}
    for i, caller in enumerate(callers, 1):
        per_caller[i] = frozenset(
            e.callee.strip_signature()
            for e in gold.edges
            if e.caller.strip_signature() == caller
        )
    return AnswerSheet(program_id or gold.program_id, per_caller)


def render_answer_block(
    callers: list[QualifiedName], sheet: AnswerSheet
) -> str:
    """Numbered answers, one line per question, callees in sorted order."""
    lines = []
    for i in range(1, len(callers) + 1):
        names = sorted(n.text for n in sheet.per_caller.get(i, frozenset()))
        lines.append(f"{i}. {', '.join(names)}".rstrip())
    return "\n".join(lines)


def aggregate(
    per_program: list[tuple[Language, Metrics]], pooling: str = "micro"
) -> tuple[dict[Language, Metrics], Metrics]:
    """Per-language pooling plus the cross-language unweighted average."""
    if not per_program:
        raise ValueError("nothing to aggregate")
    if pooling not in ("micro", "macro"):
        raise ValueError(f"unknown pooling {pooling!r}")
    by_language: dict[Language, list[Metrics]] = {}
    for language, metrics in per_program:
        by_language.setdefault(language, []).append(metrics)

    per_language: dict[Language, Metrics] = {}
    for language in sorted(by_language, key=lambda lang: lang.value):
        group = by_language[language]
        if pooling == "micro":
            per_language[language] = Metrics.from_counts(
                sum(m.tp for m in group),
                sum(m.fp for m in group),
                sum(m.fn for m in group),
            )
        else:
            n = len(group)
            per_language[language] = Metrics.from_ratios(
                sum(m.precision for m in group) / n,
                sum(m.recall for m in group) / n,
                sum(m.f1 for m in group) / n,
            )

    values = list(per_language.values())
    overall = Metrics(
        tp=sum(m.tp for m in values),
        fp=sum(m.fp for m in values),
        fn=sum(m.fn for m in values),
        precision=sum(m.precision for m in values) / len(values),
        recall=sum(m.recall for m in values) / len(values),
        f1=sum(m.f1 for m in values) / len(values),
    )
    return per_language, overall


def read_answers_jsonl(path: str | Path) -> dict[str, str]:
    """JSONL of {"program_id": ..., "answer": ...} -> id -> answer text."""
    answers: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            if not line.strip():
                continue
            doc = json.loads(line)
            if "program_id" not in doc or "answer" not in doc:
                raise ValueError(f"{path}:{line_no}: need program_id and answer keys")
            answers[doc["program_id"]] = doc["answer"]
    return answers


def read_answer_files(directory: str | Path) -> dict[str, str]:
    """Collect <program_id>.answer.txt files from a directory."""
    answers: dict[str, str] = {}
    for path in sorted(Path(directory).glob("*.answer.txt")):
        answers[path.name[: -len(".answer.txt")]] = path.read_text(encoding="utf-8")
    return answers


def _metrics_doc(metrics: Metrics) -> dict:
    return {
        "tp": metrics.tp,
        "fp": metrics.fp,
        "fn": metrics.fn,
        "precision": round(metrics.precision, 6),
        "recall": round(metrics.recall, 6),
        "f1": round(metrics.f1, 6),
    }


def write_scores(
    out_path: str | Path,
    per_program: dict[str, tuple[Language, Metrics]],
    per_language: dict[Language, Metrics],
    overall: Metrics,
    csv_path: str | Path | None = None,
) -> None:
    """scores.json (and optional CSV) with per-program/language/overall rows."""
    doc = {
        "per_program": {
            pid: {"language": lang.value, **_metrics_doc(m)}
            for pid, (lang, m) in sorted(per_program.items())
        },
        "per_language": {
            lang.value: _metrics_doc(m) for lang, m in sorted(
                per_language.items(), key=lambda kv: kv[0].value
            )
        },
        "overall": _metrics_doc(overall),
    }
    payload = (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    Path(out_path).write_bytes(payload)
    if csv_path is not None:
        with open(csv_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["program_id", "language", "tp", "fp", "fn",
                             "precision", "recall", "f1"])
            for pid, (lang, m) in sorted(per_program.items()):
                writer.writerow([pid, lang.value, m.tp, m.fp, m.fn,
                                 f"{m.precision:.6f}", f"{m.recall:.6f}",
                                 f"{m.f1:.6f}"])
