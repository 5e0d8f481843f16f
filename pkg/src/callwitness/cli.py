"""Command line front end: one subcommand per pipeline stage.

Exit codes form a small taxonomy rather than a boolean:

  0  success
  1  domain rejection (program rejected, all candidates filtered out, ...)
  2  usage error (bad flags, malformed inputs, unknown subcommand)
  3  infrastructure failure (missing toolchain, network, generation client)

Every subcommand accepts --config pointing at a JSON object whose keys
mirror the global flags; explicit flags win over config values so a pinned
config can still be overridden per run.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    AuthError,
    CallwitnessError,
    GenerationClientError,
    NetworkError,
    NotCompilableError,
    RateLimitedError,
    ToolchainMissingError,
)
from .executor import ExecConfig, OUTCOME_OK, execute_traced
from .java.instrument import instrument_java
from .js.instrument import instrument_js
from .pipeline import (
    DEFAULT_TEST_FRACTION,
    EXTENSIONS,
    CandidateFile,
    GitHubGraphQLClient,
    MockGenerationClient,
    PoolCriteria,
    filter_candidates,
    generate_harness,
    load_corpus,
    load_instance,
    query_repo_pool,
    read_splits,
    save_instance,
    split_corpus,
    write_splits,
    write_stats,
)
from .pipeline import corpus_stats as compute_corpus_stats
from .schema import Language, ProgramInstance, serialize_callgraph
from .scorer import (
    Metrics,
    aggregate,
    parse_answer,
    question_callers,
    read_answer_files,
    read_answers_jsonl,
    render_eval_prompt,
    score_program,
    write_scores,
)
from .validator import prepare_instance, serialize_report, validate

_INFRASTRUCTURE = (
    ToolchainMissingError,
    NetworkError,
    AuthError,
    RateLimitedError,
    GenerationClientError,
)

_CONFIG_KEYS = frozenset(
    {"seed", "workers", "timeout", "lang", "out",
     "node_cmd", "java_cmd", "pytrace_cmd"}
)


@dataclass(frozen=True)
class CliOptions:
    """Global flags after merging the config file underneath them."""

    seed: int = 0
    workers: int = 1
    timeout: float = 10.0
    lang: Language | None = None
    out: Path | None = None
    node_cmd: str = "node"
    java_cmd: str = "builtin"
    pytrace_cmd: str = "callwitness-pytrace"

    def exec_config(self) -> ExecConfig:
        return ExecConfig(
            node_cmd=self.node_cmd,
            java_cmd=self.java_cmd,
            pytrace_cmd=self.pytrace_cmd,
            timeout_s=self.timeout,
            workers=self.workers,
            seed=self.seed,
        )


def _load_config(path: str) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return doc


def resolve_options(args: argparse.Namespace) -> CliOptions:
    cfg = _load_config(args.config) if args.config else {}

    def pick(flag, key, default):
        return flag if flag is not None else cfg.get(key, default)

    lang_raw = pick(args.lang, "lang", None)
    out_raw = pick(args.out, "out", None)
    return CliOptions(
        seed=int(pick(args.seed, "seed", 0)),
        workers=int(pick(args.workers, "workers", 1)),
        timeout=float(pick(args.timeout, "timeout", 10.0)),
        lang=Language(lang_raw) if lang_raw else None,
        out=Path(out_raw) if out_raw else None,
        node_cmd=str(cfg.get("node_cmd", "node")),
        java_cmd=str(cfg.get("java_cmd", "builtin")),
        pytrace_cmd=str(cfg.get("pytrace_cmd", "callwitness-pytrace")),
    )


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    path.write_bytes(payload)


def _candidates_from_file(path: Path) -> list[CandidateFile]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise ValueError("candidate file must hold a JSON array")
    files = []
    for row in doc:
        files.append(
            CandidateFile.create(
                row["repo"], row["path"], Language(row["language"]), row["source"]
            )
        )
    return files


def _candidates_doc(files: list[CandidateFile]) -> list[dict]:
    return [
        {
            "repo": f.repo,
            "path": f.path,
            "language": f.language.value,
            "source": f.source,
            "loc": f.loc,
            "def_count": f.def_count,
        }
        for f in files
    ]


def _instrumented_text(instance: ProgramInstance) -> str:
    if instance.language is Language.JAVA:
        return instrument_java(instance.source).text
    if instance.language is Language.JAVASCRIPT:
        return instrument_js(instance.source, instance.program_id).text
    return instance.source  # python is traced at runtime, not rewritten


# ---------------------------------------------------------------- handlers


def cmd_ingest(args: argparse.Namespace, opts: CliOptions) -> int:
    if opts.lang is None:
        raise ValueError("ingest requires --lang")
    client = GitHubGraphQLClient()
    records = query_repo_pool(client, PoolCriteria(opts.lang))
    out_dir = opts.out or Path("corpus")
    doc = [
        {"slug": r.slug, "stars": r.stars, "license": r.license} for r in records
    ]
    pool_path = out_dir / f"pool_{opts.lang.value}.json"
    _write_json(pool_path, doc)
    print(f"{len(records)} repositories -> {pool_path}")
    return 0


def cmd_filter(args: argparse.Namespace, opts: CliOptions) -> int:
    in_path = Path(args.candidates)
    files = _candidates_from_file(in_path)
    kept = filter_candidates(files, per_repo_cap=args.cap, seed=opts.seed)
    if not kept:
        print("all candidates rejected by the size/definition filter",
              file=sys.stderr)
        return 1
    out_dir = opts.out or in_path.parent
    out_path = out_dir / "filtered.json"
    _write_json(out_path, _candidates_doc(kept))
    print(f"{len(kept)} of {len(files)} candidates -> {out_path}")
    return 0


def cmd_harness(args: argparse.Namespace, opts: CliOptions) -> int:
    files = _candidates_from_file(Path(args.candidates))
    canned = json.loads(Path(args.responses).read_text(encoding="utf-8"))
    if not isinstance(canned, dict):
        raise ValueError("responses file must hold a JSON object")
    client = MockGenerationClient(canned)
    out_dir = opts.out or Path("corpus")
    generated = 0
    for index, cand in enumerate(files):
        try:
            inst = generate_harness(cand, client, index=index)
        except NotCompilableError as exc:
            print(f"rejected {cand.repo}:{cand.path}: {exc}", file=sys.stderr)
            continue
        meta = {"path": cand.path, "loc": cand.loc, "def_count": cand.def_count}
        inst_dir = save_instance(out_dir, inst, meta)
        print(f"{inst.program_id} -> {inst_dir}")
        generated += 1
    if not generated:
        print("no candidate produced a compilable harness", file=sys.stderr)
        return 1
    return 0


def cmd_instrument(args: argparse.Namespace, opts: CliOptions) -> int:
    inst_dir = Path(args.instance)
    instance, _ = load_instance(inst_dir, with_ground_truth=False)
    text = _instrumented_text(instance)
    ext = EXTENSIONS[instance.language]
    out_path = (opts.out or inst_dir) / f"instrumented.{ext}"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text, encoding="utf-8")
    print(f"{instance.program_id} -> {out_path}")
    return 0


def cmd_trace(args: argparse.Namespace, opts: CliOptions) -> int:
    instance, _ = load_instance(Path(args.instance), with_ground_truth=False)
    prepared, inventory = prepare_instance(instance)
    run = execute_traced(prepared, opts.exec_config(), inventory=inventory)
    pairs = sorted((e.caller.text, e.callee.text) for e in run.edges)
    for caller, callee in pairs:
        print(f"{caller}\t{callee}")
    if opts.out is not None:
        doc = {
            "program_id": run.program_id,
            "outcome": run.outcome,
            "exit_status": run.exit_status,
            "edges": [[c, e] for c, e in pairs],
        }
        _write_json(opts.out / f"{run.program_id}.trace.json", doc)
    if run.outcome != OUTCOME_OK:
        print(f"{run.program_id}: {run.outcome} (exit {run.exit_status})",
              file=sys.stderr)
        return 1
    return 0


def cmd_validate(args: argparse.Namespace, opts: CliOptions) -> int:
    inst_dir = Path(args.instance)
    instance, _ = load_instance(inst_dir, with_ground_truth=False)
    report = validate(instance, opts.exec_config())
    (inst_dir / "report.json").write_bytes(serialize_report(report))
    callgraph_path = inst_dir / "callgraph.json"
    if report.accepted:
        callgraph_path.write_bytes(serialize_callgraph(report.ground_truth))
        print(f"{report.program_id}: accepted "
              f"({len(report.ground_truth.edges)} edges)")
        return 0
    callgraph_path.unlink(missing_ok=True)  # drop stale acceptance artifacts
    print(f"{report.program_id}: rejected ({', '.join(report.failures)})",
          file=sys.stderr)
    return 1


def cmd_split(args: argparse.Namespace, opts: CliOptions) -> int:
    corpus_dir = Path(args.corpus)
    instances = [inst for inst, _ in load_corpus(corpus_dir)]
    if not instances:
        print(f"no instances under {corpus_dir}", file=sys.stderr)
        return 1
    assignments = split_corpus(
        instances, test_fraction=args.fraction, seed=opts.seed
    )
    path = write_splits(opts.out or corpus_dir, assignments)
    test_repos = sum(1 for a in assignments if a.split.value == "test")
    print(f"{test_repos} test repositories of {len(assignments)} -> {path}")
    return 0


def cmd_stats(args: argparse.Namespace, opts: CliOptions) -> int:
    corpus_dir = Path(args.corpus)
    instances = [inst for inst, _ in load_corpus(corpus_dir)]
    assignments = None
    if (corpus_dir / "splits.json").is_file():
        assignments = read_splits(corpus_dir)
    table = compute_corpus_stats(instances, assignments)
    path = write_stats(opts.out or corpus_dir, table)
    for language, row in table.items():
        print(f"{language}: {row['programs']['total']} programs")
    print(f"stats -> {path}")
    return 0


def cmd_prompt(args: argparse.Namespace, opts: CliOptions) -> int:
    instance, _ = load_instance(Path(args.instance))
    system_text, user_text, callers = render_eval_prompt(instance)
    if opts.out is not None:
        doc = {
            "system": system_text,
            "user": user_text,
            "callers": [c.text for c in callers],
        }
        path = opts.out / f"{instance.program_id}.prompt.json"
        _write_json(path, doc)
        print(f"{instance.program_id} -> {path}")
    else:
        print(user_text, end="")
    return 0


def cmd_score(args: argparse.Namespace, opts: CliOptions) -> int:
    answers_path = Path(args.answers)
    if answers_path.is_dir():
        answers = read_answer_files(answers_path)
    else:
        answers = read_answers_jsonl(answers_path)
    if not answers:
        print("no answers to score", file=sys.stderr)
        return 1
    gold = {
        inst.program_id: inst
        for inst, _ in load_corpus(Path(args.gold))
        if inst.ground_truth is not None
    }
    per_program: dict[str, tuple[Language, Metrics]] = {}
    for pid in sorted(answers):
        inst = gold.get(pid)
        if inst is None:
            print(f"no gold call graph for {pid}", file=sys.stderr)
            return 1
        callers = question_callers(inst.ground_truth)
        sheet = parse_answer(answers[pid], callers, inst.language, pid)
        metrics = score_program(sheet, inst.ground_truth, callers)
        per_program[pid] = (inst.language, metrics)
    per_language, overall = aggregate(
        list(per_program.values()), pooling=args.pooling
    )
    out_dir = opts.out or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_scores(out_dir / "scores.json", per_program, per_language, overall,
                 csv_path=out_dir / "scores.csv")
    print(f"{len(per_program)} programs scored -> {out_dir / 'scores.json'}")
    print(f"overall: P={overall.precision:.3f} R={overall.recall:.3f} "
          f"F1={overall.f1:.3f}")
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config merged under the flags")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--workers", type=int)
    shared.add_argument("--timeout", type=float)
    shared.add_argument("--lang", choices=[lang.value for lang in Language])
    shared.add_argument("--out", help="output directory")

    parser = argparse.ArgumentParser(
        prog="callwitness",
        description="execution-witnessed call-graph benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", parents=[shared],
                       help="query the repository pool for one language")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("filter", parents=[shared],
                       help="apply the size/definition funnel to candidates")
    p.add_argument("candidates", help="candidates JSON file")
    p.add_argument("--cap", type=int, default=30,
                   help="per-repository candidate cap")
    p.set_defaults(handler=cmd_filter)

    p = sub.add_parser("harness", parents=[shared],
                       help="generate self-contained harness programs")
    p.add_argument("candidates", help="candidates JSON file")
    p.add_argument("--responses", required=True,
                   help="JSON object of canned generation responses")
    p.set_defaults(handler=cmd_harness)

    p = sub.add_parser("instrument", parents=[shared],
                       help="write the instrumented source for inspection")
    p.add_argument("instance", help="instance directory")
    p.set_defaults(handler=cmd_instrument)

    p = sub.add_parser("trace", parents=[shared],
                       help="run once and print the traced edges")
    p.add_argument("instance", help="instance directory")
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("validate", parents=[shared],
                       help="run the acceptance gate on one instance")
    p.add_argument("instance", help="instance directory")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("split", parents=[shared],
                       help="assign repositories to train/test")
    p.add_argument("corpus", help="corpus directory")
    p.add_argument("--fraction", type=float, default=DEFAULT_TEST_FRACTION,
                   help="target test fraction per language")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("stats", parents=[shared],
                       help="write per-language corpus statistics")
    p.add_argument("corpus", help="corpus directory")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("prompt", parents=[shared],
                       help="render the evaluation prompt for one instance")
    p.add_argument("instance", help="instance directory")
    p.set_defaults(handler=cmd_prompt)

    p = sub.add_parser("score", parents=[shared],
                       help="score predicted call graphs against gold")
    p.add_argument("--gold", required=True, help="corpus directory")
    p.add_argument("--answers", required=True,
                   help="answers JSONL file or directory of .answer.txt files")
    p.add_argument("--pooling", choices=["micro", "macro"], default="micro",
                   help="within-language aggregation")
    p.set_defaults(handler=cmd_score)

    return parser


def cli_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    try:
        opts = resolve_options(args)
        return args.handler(args, opts)
    except _INFRASTRUCTURE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CallwitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
