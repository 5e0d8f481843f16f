import hashlib
import json

import pytest

from callwitness.cli import build_parser, cli_dispatch, resolve_options
from callwitness.pipeline import render_harness_prompt, save_instance
from callwitness.schema import (
    CallEdge,
    CallGraph,
    Language,
    ProgramInstance,
    parse_qualified_name,
)
from callwitness.scorer import (
    answers_from_gold,
    question_callers,
    render_answer_block,
)
from callwitness.validator import AcceptanceReport

CHAIN_JS = (
    "function f() {\n"
    "  return g();\n"
    "}\n"
    "function g() {\n"
    "  return h();\n"
    "}\n"
    "function h() {\n"
    "  return 7;\n"
    "}\n"
    "f();\n"
)

SINGLE_EDGE_JS = (
    "function f() {\n"
    "  return g();\n"
    "}\n"
    "function g() {\n"
    "  return 1;\n"
    "}\n"
    "f();\n"
)


def save_js(corpus, pid, source):
    inst = ProgramInstance.create(pid, Language.JAVASCRIPT, source, "o/r")
    return save_instance(corpus, inst, {})


def chain_gold():
    names = [
        parse_qualified_name(f"p_chain.{n}", Language.JAVASCRIPT)
        for n in ("<toplevel>", "f", "g", "h")
    ]
    edges = frozenset(
        {
            CallEdge(names[0], names[1]),
            CallEdge(names[1], names[2]),
            CallEdge(names[2], names[3]),
        }
    )
    return CallGraph(Language.JAVASCRIPT, "p_chain", edges, frozenset(names))


class TestDispatchBasics:
    def test_unknown_subcommand_is_usage(self, capsys):
        assert cli_dispatch(["bogus"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_no_arguments_is_usage(self, capsys):
        assert cli_dispatch([]) == 2

    def test_help_exits_zero(self, capsys):
        assert cli_dispatch(["--help"]) == 0


class TestOptionResolution:
    def parse(self, argv):
        return build_parser().parse_args(argv)

    def test_flags_win_over_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 3, "timeout": 5.5, "lang": "java"}))
        opts = resolve_options(
            self.parse(
                ["filter", "x.json", "--config", str(cfg), "--seed", "9"]
            )
        )
        assert opts.seed == 9
        assert opts.timeout == 5.5
        assert opts.lang is Language.JAVA

    def test_defaults_without_config(self):
        opts = resolve_options(self.parse(["filter", "x.json"]))
        assert (opts.seed, opts.workers, opts.timeout) == (0, 1, 10.0)
        assert opts.lang is None and opts.out is None
        assert opts.exec_config().node_cmd == "node"

    def test_unknown_config_key_is_usage(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sede": 1}))
        assert cli_dispatch(["split", ".", "--config", str(cfg)]) == 2
        assert "sede" in capsys.readouterr().err

    def test_toolchain_paths_come_from_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"node_cmd": "/opt/node"}))
        opts = resolve_options(self.parse(["trace", "x", "--config", str(cfg)]))
        assert opts.exec_config().node_cmd == "/opt/node"


class TestValidateCommand:
    def test_accepts_and_writes_stable_callgraph(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_chain", CHAIN_JS)
        assert cli_dispatch(["validate", str(inst_dir)]) == 0
        assert "accepted" in capsys.readouterr().out
        first = (inst_dir / "callgraph.json").read_bytes()
        assert cli_dispatch(["validate", str(inst_dir)]) == 0
        assert (inst_dir / "callgraph.json").read_bytes() == first
        assert (inst_dir / "report.json").exists()

    def test_rejection_exits_one_and_clears_stale_graph(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_one", SINGLE_EDGE_JS)
        (inst_dir / "callgraph.json").write_text("{}")
        assert cli_dispatch(["validate", str(inst_dir)]) == 1
        assert "insufficient_edges" in capsys.readouterr().err
        assert not (inst_dir / "callgraph.json").exists()
        report = json.loads((inst_dir / "report.json").read_text())
        assert report["failures"] == ["insufficient_edges"]

    def test_missing_toolchain_is_infrastructure(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_chain", CHAIN_JS)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"node_cmd": "no-such-node-xyz"}))
        code = cli_dispatch(["validate", str(inst_dir), "--config", str(cfg)])
        assert code == 3

    def test_missing_instance_dir_is_usage(self, tmp_path):
        assert cli_dispatch(["validate", str(tmp_path / "nope")]) == 2


class TestTraceAndInstrument:
    def test_trace_prints_sorted_edges(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_chain", CHAIN_JS)
        out = tmp_path / "traces"
        code = cli_dispatch(["trace", str(inst_dir), "--out", str(out)])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines == [
            "p_chain.<toplevel>\tp_chain.f",
            "p_chain.f\tp_chain.g",
            "p_chain.g\tp_chain.h",
        ]
        doc = json.loads((out / "p_chain.trace.json").read_text())
        assert doc["outcome"] == "ok"
        assert doc["edges"][0] == ["p_chain.<toplevel>", "p_chain.f"]

    def test_trace_failure_exits_one(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_boom", "function f() {\n  return null.x;\n}\nf();\n")
        assert cli_dispatch(["trace", str(inst_dir)]) == 1
        assert "crashed" in capsys.readouterr().err

    def test_instrument_writes_inspectable_source(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_chain", CHAIN_JS)
        assert cli_dispatch(["instrument", str(inst_dir)]) == 0
        text = (inst_dir / "instrumented.js").read_text()
        assert "CALLWITNESS" in text
        assert "function f()" in text

    def test_instrument_python_is_identity(self, tmp_path):
        inst = ProgramInstance.create(
            "p_py", Language.PYTHON, "def f():\n    return 1\n\nf()\n", "o/r"
        )
        inst_dir = save_instance(tmp_path, inst, {})
        assert cli_dispatch(["instrument", str(inst_dir)]) == 0
        assert (inst_dir / "instrumented.py").read_text() == inst.source


class TestFunnelCommands:
    def write_candidates(self, path, rows):
        path.write_text(json.dumps(rows))
        return path

    def candidate_row(self, path="a.py", loc=25):
        lines = ["def f():", "    pass"] + [f"x{k} = {k}" for k in range(loc - 2)]
        return {
            "repo": "o/r",
            "path": path,
            "language": "python",
            "source": "\n".join(lines) + "\n",
        }

    def test_filter_boundary_and_output(self, tmp_path, capsys):
        cand = self.write_candidates(
            tmp_path / "candidates.json",
            [self.candidate_row("small.py", loc=19),
             self.candidate_row("big.py", loc=20)],
        )
        out = tmp_path / "filtered_dir"
        assert cli_dispatch(["filter", str(cand), "--out", str(out)]) == 0
        doc = json.loads((out / "filtered.json").read_text())
        assert [row["path"] for row in doc] == ["big.py"]
        assert doc[0]["loc"] == 20

    def test_filter_everything_rejected(self, tmp_path, capsys):
        cand = self.write_candidates(
            tmp_path / "candidates.json", [self.candidate_row(loc=5)]
        )
        assert cli_dispatch(["filter", str(cand)]) == 1
        assert "rejected" in capsys.readouterr().err

    def test_harness_generates_instances(self, tmp_path, capsys):
        row = {
            "repo": "o/mathlib",
            "path": "src/ops.js",
            "language": "javascript",
            "source": "function f() { return 1; }\n",
        }
        cand = self.write_candidates(tmp_path / "candidates.json", [row])
        from callwitness.pipeline import CandidateFile

        prompt = render_harness_prompt(
            CandidateFile.create(
                row["repo"], row["path"], Language.JAVASCRIPT, row["source"]
            )
        )
        harness = (
            "function double(x) {\n"
            "  return x * 2;\n"
            "}\n"
            "function run() {\n"
            "  return double(4);\n"
            "}\n"
            "run();\n"
        )
        responses = tmp_path / "responses.json"
        responses.write_text(json.dumps(
            {hashlib.sha256(prompt.encode("utf-8")).hexdigest(): harness}
        ))
        corpus = tmp_path / "corpus"
        code = cli_dispatch([
            "harness", str(cand), "--responses", str(responses),
            "--out", str(corpus),
        ])
        assert code == 0
        inst_dir = corpus / "javascript" / "mathlib_0000"
        assert (inst_dir / "program.js").read_text() == harness
        meta = json.loads((inst_dir / "meta.json").read_text())
        assert meta["repo"] == "o/mathlib"
        assert meta["path"] == "src/ops.js"

    def test_harness_all_uncompilable_is_domain_rejection(self, tmp_path, capsys):
        row = {
            "repo": "o/r",
            "path": "a.js",
            "language": "javascript",
            "source": "function f() { return 1; }\n",
        }
        cand = self.write_candidates(tmp_path / "candidates.json", [row])
        from callwitness.pipeline import CandidateFile

        prompt = render_harness_prompt(
            CandidateFile.create("o/r", "a.js", Language.JAVASCRIPT, row["source"])
        )
        responses = tmp_path / "responses.json"
        responses.write_text(json.dumps(
            {hashlib.sha256(prompt.encode("utf-8")).hexdigest():
             'const fs = require("fs");\n'}
        ))
        code = cli_dispatch([
            "harness", str(cand), "--responses", str(responses),
            "--out", str(tmp_path / "corpus"),
        ])
        assert code == 1

    def test_harness_missing_response_is_infrastructure(self, tmp_path):
        cand = self.write_candidates(
            tmp_path / "candidates.json",
            [{"repo": "o/r", "path": "a.js", "language": "javascript",
              "source": "function f() { return 1; }\n"}],
        )
        responses = tmp_path / "responses.json"
        responses.write_text("{}")
        code = cli_dispatch([
            "harness", str(cand), "--responses", str(responses),
            "--out", str(tmp_path / "corpus"),
        ])
        assert code == 3

    def test_ingest_requires_lang(self, capsys):
        assert cli_dispatch(["ingest"]) == 2

    def test_ingest_without_token_is_infrastructure(self, tmp_path, monkeypatch):
        monkeypatch.delenv("CALLWITNESS_API_TOKEN", raising=False)
        code = cli_dispatch(
            ["ingest", "--lang", "python", "--out", str(tmp_path)]
        )
        assert code == 3


class TestSplitStatsScore:
    def seeded_corpus(self, tmp_path, repos=10):
        corpus = tmp_path / "corpus"
        for k in range(repos):
            pid = f"p_{k:02d}"
            qn = lambda n: parse_qualified_name(f"{pid}.{n}", Language.PYTHON)
            gt = CallGraph(
                Language.PYTHON,
                pid,
                frozenset({CallEdge(qn("f"), qn("g")), CallEdge(qn("g"), qn("h"))}),
                frozenset({qn("f"), qn("g"), qn("h")}),
            )
            inst = ProgramInstance.create(
                pid, Language.PYTHON, "def f():\n    pass\n", f"o/r{k}", gt
            )
            save_instance(corpus, inst, {},
                          AcceptanceReport(pid, True, gt, (), ()))
        return corpus

    def test_split_then_stats(self, tmp_path, capsys):
        corpus = self.seeded_corpus(tmp_path)
        assert cli_dispatch(["split", str(corpus), "--fraction", "0.2"]) == 0
        splits = json.loads((corpus / "splits.json").read_text())
        assert sorted(splits.values()).count("test") == 2
        first = (corpus / "splits.json").read_bytes()
        assert cli_dispatch(["split", str(corpus), "--fraction", "0.2"]) == 0
        assert (corpus / "splits.json").read_bytes() == first

        assert cli_dispatch(["stats", str(corpus)]) == 0
        stats = json.loads((corpus / "stats.json").read_text())
        assert stats["python"]["programs"] == {"total": 10, "test": 2, "train": 8}
        assert stats["python"]["edges_per_program"]["mean"] == 2.0

    def test_split_empty_corpus_is_domain_rejection(self, tmp_path):
        assert cli_dispatch(["split", str(tmp_path)]) == 1

    def test_score_round_trip(self, tmp_path, capsys):
        corpus = self.seeded_corpus(tmp_path, repos=2)
        answers = tmp_path / "answers.jsonl"
        rows = []
        for pid in ("p_00", "p_01"):
            inst_dir = corpus / "python" / pid
            gt_doc = json.loads((inst_dir / "callgraph.json").read_text())
            assert gt_doc["program_id"] == pid
            from callwitness.pipeline import load_instance

            inst, _ = load_instance(inst_dir)
            callers = question_callers(inst.ground_truth)
            sheet = answers_from_gold(inst.ground_truth, callers, pid)
            rows.append(json.dumps(
                {"program_id": pid,
                 "answer": render_answer_block(callers, sheet)}
            ))
        answers.write_text("\n".join(rows) + "\n")
        out = tmp_path / "results"
        code = cli_dispatch([
            "score", "--gold", str(corpus), "--answers", str(answers),
            "--out", str(out),
        ])
        assert code == 0
        doc = json.loads((out / "scores.json").read_text())
        assert doc["overall"]["f1"] == 1.0
        assert doc["per_program"]["p_00"]["tp"] == 2
        assert (out / "scores.csv").read_text().startswith("program_id,")

    def test_score_unknown_program_is_domain_rejection(self, tmp_path, capsys):
        corpus = self.seeded_corpus(tmp_path, repos=1)
        answers = tmp_path / "answers.jsonl"
        answers.write_text(
            json.dumps({"program_id": "p_99", "answer": "1. x"}) + "\n"
        )
        code = cli_dispatch(
            ["score", "--gold", str(corpus), "--answers", str(answers)]
        )
        assert code == 1

    def test_score_missing_answers_file_is_usage(self, tmp_path):
        corpus = self.seeded_corpus(tmp_path, repos=1)
        code = cli_dispatch(
            ["score", "--gold", str(corpus),
             "--answers", str(tmp_path / "nope.jsonl")]
        )
        assert code == 2


class TestPromptCommand:
    def test_prompt_to_stdout_and_file(self, tmp_path, capsys):
        corpus = TestSplitStatsScore().seeded_corpus(tmp_path, repos=1)
        inst_dir = corpus / "python" / "p_00"
        assert cli_dispatch(["prompt", str(inst_dir)]) == 0
        text = capsys.readouterr().out
        assert "What functions are called by p_00.f?" in text
        out = tmp_path / "prompts"
        assert cli_dispatch(["prompt", str(inst_dir), "--out", str(out)]) == 0
        doc = json.loads((out / "p_00.prompt.json").read_text())
        assert doc["callers"] == ["p_00.f", "p_00.g"]
        assert "expert in Python programming" in doc["system"]

    def test_prompt_without_ground_truth_is_domain_rejection(self, tmp_path, capsys):
        inst_dir = save_js(tmp_path, "p_raw", CHAIN_JS)
        assert cli_dispatch(["prompt", str(inst_dir)]) == 1
