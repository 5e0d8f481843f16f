import json

import pytest

from callwitness.errors import ToolchainMissingError, UnsupportedConstructError
from callwitness.executor import ExecConfig
from callwitness.schema import Language, ProgramInstance, deserialize_callgraph
from callwitness.validator import (
    FAIL_EXECUTION,
    FAIL_INSUFFICIENT,
    FAIL_NONDETERMINISTIC,
    AcceptanceReport,
    serialize_report,
    validate,
    write_acceptance,
)


def js_inst(pid, source):
    return ProgramInstance.create(pid, Language.JAVASCRIPT, source, "repo/js")


def java_inst(pid, source):
    return ProgramInstance.create(pid, Language.JAVA, source, "repo/java")


CHAIN_JS = (
    "function f() {\n"
    "  return g();\n"
    "}\n"
    "function g() {\n"
    "  return h();\n"
    "}\n"
    "function h() {\n"
    "  return 1;\n"
    "}\n"
    "f();\n"
)

FANOUT_JS = (
    "function f() {\n"
    "  return 1;\n"
    "}\n"
    "function g() {\n"
    "  return 2;\n"
    "}\n"
    "f();\n"
    "g();\n"
)

FLIP_JAVA = (
    "public class Main {\n"
    "    static int even() { return 0; }\n"
    "    static int odd() { return 1; }\n"
    "    public static void main(String[] args) {\n"
    "        String path = System.getenv(\"CALLWITNESS_TRACE_OUT\");\n"
    "        int sum = 0;\n"
    "        for (int i = 0; i < path.length(); i++) {\n"
    "            sum = sum + path.charAt(i);\n"
    "        }\n"
    "        if (sum % 2 == 0) {\n"
    "            System.out.println(even());\n"
    "        } else {\n"
    "            System.out.println(odd());\n"
    "        }\n"
    "    }\n"
    "}\n"
)


class TestAccepted:
    def test_three_edge_chain(self):
        report = validate(js_inst("p_chain", CHAIN_JS), ExecConfig())
        assert report.accepted
        assert report.failures == ()
        assert len(report.runs) == 3
        gt = report.ground_truth
        assert {(e.caller.text, e.callee.text) for e in gt.edges} == {
            ("p_chain.<toplevel>", "p_chain.f"),
            ("p_chain.f", "p_chain.g"),
            ("p_chain.g", "p_chain.h"),
        }
        # inventory plus the synthetic root
        assert {n.text for n in gt.functions} == {
            "p_chain.<toplevel>",
            "p_chain.f",
            "p_chain.g",
            "p_chain.h",
        }

    def test_every_run_matches_ground_truth(self):
        report = validate(js_inst("p_chain", CHAIN_JS), ExecConfig())
        for run in report.runs:
            assert run.edges == report.ground_truth.edges

    def test_java_program_accepted(self):
        src = (
            "public class Main {\n"
            "    static int twice(int n) { return square(n) + square(n); }\n"
            "    static int square(int n) { return n * n; }\n"
            "    public static void main(String[] args) {\n"
            "        System.out.println(twice(3));\n"
            "    }\n"
            "}\n"
        )
        report = validate(java_inst("p_sq", src), ExecConfig())
        assert report.accepted
        texts = {(e.caller.text, e.callee.text) for e in report.ground_truth.edges}
        assert ("Main:main(String[])", "Main:twice(int)") in texts
        assert ("Main:twice(int)", "Main:square(int)") in texts

    def test_idempotent_ground_truth_bytes(self):
        from callwitness.schema import serialize_callgraph

        inst = js_inst("p_chain", CHAIN_JS)
        first = serialize_callgraph(validate(inst, ExecConfig()).ground_truth)
        second = serialize_callgraph(validate(inst, ExecConfig()).ground_truth)
        assert first == second


class TestRejected:
    def test_toplevel_only_edges(self):
        report = validate(js_inst("p_fan", FANOUT_JS), ExecConfig())
        assert not report.accepted
        assert report.failures == (FAIL_INSUFFICIENT,)
        assert report.ground_truth is None

    def test_single_cross_edge_is_not_enough(self):
        src = (
            "function f() {\n  return g();\n}\n"
            "function g() {\n  return 1;\n}\n"
            "f();\n"
        )
        report = validate(js_inst("p_one", src), ExecConfig())
        assert report.failures == (FAIL_INSUFFICIENT,)

    def test_crash_is_execution_error(self):
        src = (
            "function f() {\n"
            "  throw new Error(\"die\");\n"
            "}\n"
            "f();\n"
        )
        report = validate(js_inst("p_die", src), ExecConfig())
        assert not report.accepted
        # checks short-circuit: nothing about edge counts is reported
        assert report.failures == (FAIL_EXECUTION,)

    def test_branching_on_environment_is_nondeterministic(self):
        report = validate(java_inst("p_flip", FLIP_JAVA), ExecConfig())
        assert not report.accepted
        assert report.failures == (FAIL_NONDETERMINISTIC,)
        assert all(r.outcome == "ok" for r in report.runs)

    def test_uninstrumentable_source_raises(self):
        with pytest.raises(UnsupportedConstructError):
            validate(js_inst("p_eval", "eval(\"1\");\n"), ExecConfig())

    def test_missing_toolchain_aborts_rather_than_rejects(self):
        inst = ProgramInstance.create(
            "p_py", Language.PYTHON, "def f():\n    pass\n\nf()\n", "r"
        )
        cfg = ExecConfig(pytrace_cmd="no-such-shim-binary-xyz")
        with pytest.raises(ToolchainMissingError):
            validate(inst, cfg)


class TestReportShape:
    def test_invariant_enforced(self):
        with pytest.raises(ValueError):
            AcceptanceReport("p", True, None, (), ())
        with pytest.raises(ValueError):
            AcceptanceReport("p", False, None, (), ())
        with pytest.raises(ValueError):
            AcceptanceReport("p", False, None, ("bogus_kind",), ())

    def test_written_files(self, tmp_path):
        report = validate(js_inst("p_chain", CHAIN_JS), ExecConfig())
        write_acceptance(report, tmp_path)
        graph_path = tmp_path / "p_chain.callgraph.json"
        report_path = tmp_path / "p_chain.report.json"
        assert graph_path.is_file() and report_path.is_file()
        graph = deserialize_callgraph(graph_path.read_bytes())
        assert graph == report.ground_truth
        doc = json.loads(report_path.read_text())
        assert doc["accepted"] is True
        assert doc["failures"] == []
        assert len(doc["runs"]) == 3
        assert all(r["outcome"] == "ok" for r in doc["runs"])

    def test_rejected_writes_report_only(self, tmp_path):
        report = validate(js_inst("p_fan", FANOUT_JS), ExecConfig())
        write_acceptance(report, tmp_path)
        assert not (tmp_path / "p_fan.callgraph.json").exists()
        doc = json.loads((tmp_path / "p_fan.report.json").read_text())
        assert doc["failures"] == ["insufficient_edges"]

    def test_report_serialization_is_stable(self):
        report = validate(js_inst("p_chain", CHAIN_JS), ExecConfig())
        assert serialize_report(report) == serialize_report(report)
