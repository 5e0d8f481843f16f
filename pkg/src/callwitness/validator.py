"""Acceptance gate: run a harnessed program three times and keep it only if
every run finishes cleanly with the same, non-degenerate edge set.

A program is accepted iff (checked in this order, first failure reported):

  1. all three runs have outcome ok          (else execution_error)
  2. the three edge sets are identical       (else nondeterministic)
  3. >= 2 edges have a non-toplevel caller   (else insufficient_edges)
  4. the graph serializes to canonical bytes (else schema_invalid)

On acceptance the ground truth is the common edge set plus the function
inventory. The synthetic toplevel joins the inventory because it appears
as a caller and the schema requires local callers to be listed.

Rejection is a report, never an exception; infrastructure problems
(missing toolchain, uninstrumentable source) raise instead, because they
say nothing about the program under test.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaViolationError
from .executor import (
    OUTCOME_OK,
    ExecConfig,
    TraceRun,
    execute_n,
    recover_inventory,
    toplevel_caller,
)
from .java.instrument import instrument_java
from .js.instrument import instrument_js
from .schema import (
    CallGraph,
    Language,
    ProgramInstance,
    QualifiedName,
    serialize_callgraph,
)

RUN_COUNT = 3

FAIL_EXECUTION = "execution_error"
FAIL_NONDETERMINISTIC = "nondeterministic"
FAIL_INSUFFICIENT = "insufficient_edges"
FAIL_SCHEMA = "schema_invalid"
FAILURE_KINDS = (FAIL_EXECUTION, FAIL_NONDETERMINISTIC, FAIL_INSUFFICIENT, FAIL_SCHEMA)

# edges whose caller is a real function; toplevel->f edges do not count
CROSS_EDGE_MINIMUM = 2


@dataclass(frozen=True)
class AcceptanceReport:
    """Outcome of validating one program."""

    program_id: str
    accepted: bool
    ground_truth: CallGraph | None
    failures: tuple[str, ...]
    runs: tuple[TraceRun, ...]

    def __post_init__(self):
        object.__setattr__(self, "failures", tuple(self.failures))
        object.__setattr__(self, "runs", tuple(self.runs))
        for kind in self.failures:
            if kind not in FAILURE_KINDS:
                raise ValueError(f"unknown failure kind {kind!r}")
        if self.accepted != (not self.failures):
            raise ValueError("accepted must mean an empty failure list")
        if self.accepted != (self.ground_truth is not None):
            raise ValueError("accepted must mean ground truth is present")


def prepare_instance(instance: ProgramInstance) -> tuple[ProgramInstance, frozenset[QualifiedName]]:
    """Instrument the program and return it with its function inventory.

    Python programs run under an external tracer and need no rewriting;
    their inventory comes from the syntax tree.
    """
    if instance.language is Language.JAVA:
        out = instrument_java(instance.source)
        names = frozenset(e.name for e in out.inventory.methods)
    elif instance.language is Language.JAVASCRIPT:
        out = instrument_js(instance.source, instance.program_id)
        names = frozenset(e.name for e in out.inventory.functions)
    else:
        return instance, recover_inventory(instance)
    prepared = ProgramInstance.create(
        instance.program_id, instance.language, out.text, instance.repo
    )
    return prepared, names


def validate(instance: ProgramInstance, config: ExecConfig) -> AcceptanceReport:
    """Run the acceptance checks and assemble the report."""
    prepared, inventory = prepare_instance(instance)
    runs = execute_n(prepared, RUN_COUNT, config, inventory=inventory)

    failures: list[str] = []
    ground_truth: CallGraph | None = None
    if any(r.outcome != OUTCOME_OK for r in runs):
        failures.append(FAIL_EXECUTION)
    elif not all(r.edges == runs[0].edges for r in runs):
        failures.append(FAIL_NONDETERMINISTIC)
    else:
        edges = runs[0].edges
        toplevel = toplevel_caller(instance.language, instance.program_id)
        cross = sum(1 for e in edges if e.caller != toplevel)
        if cross < CROSS_EDGE_MINIMUM:
            failures.append(FAIL_INSUFFICIENT)
        else:
            try:
                graph = CallGraph(
                    instance.language,
                    instance.program_id,
                    edges,
                    inventory | {toplevel},
                )
                serialize_callgraph(graph)
            except SchemaViolationError:
                failures.append(FAIL_SCHEMA)
            else:
                ground_truth = graph

    return AcceptanceReport(
        program_id=instance.program_id,
        accepted=not failures,
        ground_truth=ground_truth,
        failures=tuple(failures),
        runs=tuple(runs),
    )


def serialize_report(report: AcceptanceReport) -> bytes:
    """report.json bytes: stable key order, two-space indent, LF, UTF-8."""
    doc = {
        "program_id": report.program_id,
        "accepted": report.accepted,
        "failures": list(report.failures),
        "runs": [
            {
                "outcome": r.outcome,
                "exit_status": r.exit_status,
                "duration_ms": r.duration_ms,
                "edge_count": len(r.edges),
                "stdout_digest": r.stdout_digest,
            }
            for r in report.runs
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_acceptance(report: AcceptanceReport, corpus_dir: str | Path) -> Path:
    """Write <id>.report.json (always) and <id>.callgraph.json (if accepted).

    Returns the report path.
    """
    corpus = Path(corpus_dir)
    corpus.mkdir(parents=True, exist_ok=True)
    report_path = corpus / f"{report.program_id}.report.json"
    report_path.write_bytes(serialize_report(report))
    if report.accepted:
        graph_path = corpus / f"{report.program_id}.callgraph.json"
        graph_path.write_bytes(serialize_callgraph(report.ground_truth))
    return report_path
