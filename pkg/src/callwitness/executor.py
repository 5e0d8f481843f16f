"""Runs one instrumented program and assembles its observed call edges.

One execution = one fresh process with CALLWITNESS_TRACE_OUT pointing at a
private trace file. The trace line protocol is fixed: a header line
`CALLWITNESS<TAB>1<TAB><language>` followed by zero or more
`CALL<TAB><caller><TAB><callee>` lines, UTF-8 with LF endings. Append-only
writes mean a crashed or killed run still leaves a usable prefix.

Workspace layout per run: `<work>/<program_id>/run<k>/{src, trace.log,
stdout.txt}`. The toolchain is named explicitly in ExecConfig; nothing is
probed from the environment.
"""

from __future__ import annotations

import ast
import hashlib
import os
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CompileFailureError,
    MalformedNameError,
    NotCompilableError,
    ToolchainMissingError,
)
from .java.instrument import JAVA_TOPLEVEL
from .java.parser import TRACER_CLASS, CompilationUnit, inventory_of, parse_java_unit
from .js.instrument import js_prelude
from .js.parser import parse_js_subset
from .schema import (
    CallEdge,
    Language,
    ProgramInstance,
    QualifiedName,
    parse_qualified_name,
    toplevel_name,
)

TRACE_ENV_VAR = "CALLWITNESS_TRACE_OUT"

OUTCOME_OK = "ok"
OUTCOME_CRASHED = "crashed"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_PROTOCOL_ERROR = "protocol_error"
OUTCOMES = frozenset(
    {OUTCOME_OK, OUTCOME_CRASHED, OUTCOME_TIMEOUT, OUTCOME_PROTOCOL_ERROR}
)

_EXTENSIONS = {
    Language.PYTHON: "py",
    Language.JAVASCRIPT: "js",
    Language.JAVA: "java",
}

# exit status recorded when the process had to be killed at the deadline
TIMEOUT_EXIT = -1


@dataclass(frozen=True)
class ExecConfig:
    """Explicit toolchain paths plus run limits; no environment probing."""

    node_cmd: str = "node"
    java_cmd: str = "builtin"  # "builtin" runs the bundled subset runtime
    pytrace_cmd: str = "callwitness-pytrace"
    timeout_s: float = 10.0
    workers: int = 1
    seed: int = 0
    work_dir: str | None = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class TraceRun:
    """Result of one instrumented execution."""

    program_id: str
    edges: frozenset[CallEdge]
    exit_status: int
    duration_ms: int
    outcome: str
    stdout_digest: str

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.outcome == OUTCOME_OK and self.exit_status != 0:
            raise ValueError("an ok run cannot have a nonzero exit status")
        if self.duration_ms < 0:
            raise ValueError("duration_ms must be >= 0")


def trace_header(language: Language) -> str:
    return f"CALLWITNESS\t1\t{language.value}"


def recover_inventory(instance: ProgramInstance) -> frozenset[QualifiedName]:
    """Function inventory of an already-instrumented source.

    Probes never add or remove inventory functions, so a trusted re-parse of
    the instrumented text (minus the injected tracer plumbing) recovers the
    same names the instrumenter recorded.
    """
    if instance.language is Language.JAVA:
        try:
            unit = parse_java_unit(instance.source, trusted=True)
        except Exception as exc:
            raise CompileFailureError(f"{instance.program_id}: {exc}") from exc
        user_unit = CompilationUnit(
            classes=tuple(c for c in unit.classes if c.name != TRACER_CLASS),
            interfaces=unit.interfaces,
            end_offset=unit.end_offset,
        )
        return frozenset(e.name for e in inventory_of(user_unit).methods)
    if instance.language is Language.JAVASCRIPT:
        text = instance.source
        prelude = js_prelude(instance.program_id)
        if text.startswith(prelude):
            text = text[len(prelude) :]
        inv = parse_js_subset(text, instance.program_id, trusted=True)
        return frozenset(e.name for e in inv.functions)
    return _python_inventory(instance.source, instance.program_id)


def _python_inventory(source: str, module: str) -> frozenset[QualifiedName]:
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        raise NotCompilableError(f"{module}: {exc}") from exc
    names: set[QualifiedName] = set()

    def walk(node, path):
        for child in ast.iter_child_nodes(node):
            if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)):
                names.add(QualifiedName(Language.PYTHON, path + (child.name,)))
                walk(child, path + (child.name,))
            elif isinstance(child, ast.ClassDef):
                walk(child, path + (child.name,))
            else:
                walk(child, path)

    walk(tree, (module,))
    return frozenset(names)


def toplevel_caller(language: Language, program_id: str) -> QualifiedName:
    if language is Language.JAVA:
        return parse_qualified_name(JAVA_TOPLEVEL, Language.JAVA)
    return toplevel_name(language, program_id)


def parse_trace_file(
    path: Path,
    language: Language,
    program_id: str,
    inventory: frozenset[QualifiedName],
) -> tuple[frozenset[CallEdge], str | None]:
    """Parse a trace file into a deduplicated edge set.

    Returns (edges, problem). A missing or empty file is zero edges with no
    problem; a bad header, malformed line, or unknown endpoint name is
    reported as a problem while well-formed lines are still collected, so a
    crash prefix stays usable.
    """
    if not path.exists():
        return frozenset(), None
    raw = path.read_text(encoding="utf-8")
    if not raw:
        return frozenset(), None
    # a line is only a line once its LF landed; drop any torn tail
    lines = raw.split("\n")[:-1]
    if not lines:
        return frozenset(), None
    if lines[0] != trace_header(language):
        return frozenset(), f"bad header {lines[0]!r}"
    toplevel = toplevel_caller(language, program_id)
    problem = None
    edges: set[CallEdge] = set()
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 3 or parts[0] != "CALL":
            problem = problem or f"malformed line {ln!r}"
            continue
        try:
            caller = parse_qualified_name(parts[1], language)
            callee = parse_qualified_name(parts[2], language)
        except MalformedNameError as exc:
            problem = problem or str(exc)
            continue
        if callee not in inventory:
            problem = problem or f"unknown callee {parts[2]!r}"
            continue
        if caller not in inventory and caller != toplevel:
            problem = problem or f"unknown caller {parts[1]!r}"
            continue
        edges.add(CallEdge(caller, callee))
    return frozenset(edges), problem


def _command_for(instance: ProgramInstance, config: ExecConfig, src_path: Path):
    if instance.language is Language.JAVASCRIPT:
        return [config.node_cmd, str(src_path)]
    if instance.language is Language.JAVA:
        if config.java_cmd == "builtin":
            return [sys.executable, "-m", "callwitness.java.runtime", str(src_path)]
        return [config.java_cmd, str(src_path)]
    return [config.pytrace_cmd, str(src_path)]


def _run_once(
    instance: ProgramInstance,
    config: ExecConfig,
    inventory: frozenset[QualifiedName],
    run_dir: Path,
) -> TraceRun:
    if run_dir.exists():
        shutil.rmtree(run_dir)
    src_dir = run_dir / "src"
    src_dir.mkdir(parents=True)
    src_path = src_dir / f"{instance.program_id}.{_EXTENSIONS[instance.language]}"
    src_path.write_text(instance.source, encoding="utf-8")
    trace_path = run_dir / "trace.log"

    env = dict(os.environ)
    env[TRACE_ENV_VAR] = str(trace_path)
    cmd = _command_for(instance, config, src_path)

    start = time.monotonic()
    timed_out = False
    try:
        proc = subprocess.run(
            cmd,
            cwd=run_dir,
            env=env,
            capture_output=True,
            timeout=config.timeout_s,
        )
        exit_status = proc.returncode
        stdout = proc.stdout or b""
        stderr = proc.stderr or b""
    except subprocess.TimeoutExpired as exc:
        timed_out = True
        exit_status = TIMEOUT_EXIT
        stdout = exc.stdout or b""
        stderr = exc.stderr or b""
    except FileNotFoundError as exc:
        raise ToolchainMissingError(
            f"runtime command not found: {cmd[0]!r}"
        ) from exc
    duration_ms = int((time.monotonic() - start) * 1000)

    (run_dir / "stdout.txt").write_bytes(stdout)
    if instance.language is Language.JAVA:
        builtin = config.java_cmd == "builtin"
        if (builtin and exit_status == 2) or (
            not builtin and b"error: compilation failed" in stderr
        ):
            raise CompileFailureError(
                f"{instance.program_id}: {stderr.decode('utf-8', 'replace').strip()}"
            )

    edges, problem = parse_trace_file(
        trace_path, instance.language, instance.program_id, inventory
    )
    if timed_out:
        outcome = OUTCOME_TIMEOUT
    elif exit_status != 0:
        outcome = OUTCOME_CRASHED
    elif problem is not None:
        outcome = OUTCOME_PROTOCOL_ERROR
    else:
        outcome = OUTCOME_OK
    return TraceRun(
        program_id=instance.program_id,
        edges=edges,
        exit_status=exit_status,
        duration_ms=duration_ms,
        outcome=outcome,
        stdout_digest=hashlib.sha256(stdout).hexdigest(),
    )


def execute_n(
    instance: ProgramInstance,
    n: int,
    config: ExecConfig,
    inventory: frozenset[QualifiedName] | None = None,
) -> list[TraceRun]:
    """n independent executions: fresh process, directory, and trace file each.

    Runs are sequential so machine load cannot mask nondeterminism. Results
    are in run order; per-run failures land in TraceRun.outcome rather than
    raising (infrastructure failures still raise).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    inv = inventory if inventory is not None else recover_inventory(instance)
    owned = config.work_dir is None
    base = (
        Path(tempfile.mkdtemp(prefix="callwitness-exec-"))
        if owned
        else Path(config.work_dir)
    )
    try:
        prog_dir = base / instance.program_id
        return [
            _run_once(instance, config, inv, prog_dir / f"run{k}") for k in range(n)
        ]
    finally:
        if owned:
            shutil.rmtree(base, ignore_errors=True)


def execute_traced(
    instance: ProgramInstance,
    config: ExecConfig,
    inventory: frozenset[QualifiedName] | None = None,
) -> TraceRun:
    """One instrumented execution; see execute_n for the workspace contract."""
    return execute_n(instance, 1, config, inventory)[0]
