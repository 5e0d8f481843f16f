import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from callwitness.errors import MissingGroundTruthError
from callwitness.scorer import (
    AnswerSheet,
    Metrics,
    aggregate,
    answers_from_gold,
    parse_answer,
    read_answer_files,
    read_answers_jsonl,
    render_answer_block,
    render_eval_prompt,
    score_program,
    write_scores,
)
from callwitness.schema import (
    CallEdge,
    CallGraph,
    Language,
    ProgramInstance,
    parse_qualified_name,
)


def graph(language, program_id, pairs):
    edges = frozenset(
        CallEdge(
            parse_qualified_name(c, language), parse_qualified_name(e, language)
        )
        for c, e in pairs
    )
    functions = frozenset(n for e in edges for n in (e.caller, e.callee))
    return CallGraph(language, program_id, edges, functions)


def qn(text, language=Language.PYTHON):
    return parse_qualified_name(text, language)


class TestMetrics:
    def test_from_counts_vector(self):
        m = Metrics.from_counts(5, 1, 0)
        assert abs(m.precision - 5 / 6) < 1e-12
        assert m.recall == 1.0
        assert abs(m.f1 - 10 / 11) < 1e-12

    def test_zero_denominator_conventions(self):
        assert Metrics.from_counts(0, 0, 5) == Metrics(0, 0, 5, 0.0, 0.0, 0.0)
        assert Metrics.from_counts(0, 5, 0).precision == 0.0
        assert Metrics.from_counts(0, 0, 0).f1 == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Metrics(-1, 0, 0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Metrics(0, 0, 0, 1.5, 0.0, 0.0)

    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    def test_f1_bounded_by_max(self, tp, fp, fn):
        m = Metrics.from_counts(tp, fp, fn)
        assert m.f1 <= max(m.precision, m.recall) + 1e-12

    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    def test_extra_fp_never_helps(self, tp, fp, fn):
        base = Metrics.from_counts(tp, fp, fn)
        worse = Metrics.from_counts(tp, fp + 1, fn)
        assert worse.precision <= base.precision + 1e-12
        assert worse.recall == base.recall


PY_GOLD = graph(
    Language.PYTHON,
    "main",
    [
        ("main.<toplevel>", "main.run"),
        ("main.run", "main.helper"),
        ("main.run", "main.Config.__init__"),
    ],
)


def py_instance():
    src = "def helper():\n    pass\n\ndef run():\n    helper()\n\nrun()\n"
    return ProgramInstance.create("main", Language.PYTHON, src, "r", PY_GOLD)


class TestRenderEvalPrompt:
    def test_question_per_caller_and_rule_text(self):
        system_text, user_text, callers = render_eval_prompt(py_instance())
        assert [c.text for c in callers] == ["main.<toplevel>", "main.run"]
        questions = user_text.split("**Questions**:")[1]
        assert questions.count("What functions are called by") == 2
        assert "Always use fully qualified names with the module prefix" in user_text
        assert "You are an expert in Python programming" in system_text
        assert "**Python Code Provided**" in user_text
        assert py_instance().source in user_text
        assert user_text.endswith("**Answers**:\n")

    def test_deterministic(self):
        assert render_eval_prompt(py_instance()) == render_eval_prompt(py_instance())

    def test_requires_ground_truth(self):
        bare = ProgramInstance.create("main", Language.PYTHON, "x = 1\n", "r")
        with pytest.raises(MissingGroundTruthError):
            render_eval_prompt(bare)

    def test_java_callers_lose_signatures_and_merge(self):
        gold = graph(
            Language.JAVA,
            "p",
            [
                ("Main:main(String[])", "Main:add(int, int)"),
                ("Main:add(int, int)", "Main:inc(int)"),
                ("Main:add(long, long)", "Main:inc(long)"),
            ],
        )
        inst = ProgramInstance.create(
            "p", Language.JAVA, "class Main {}\n", "r", gold
        )
        _, user_text, callers = render_eval_prompt(inst)
        assert [c.text for c in callers] == ["Main:add", "Main:main"]
        assert "Main:add(int, int)" not in user_text.split("**Questions**:")[1]

    def test_worked_example_matches_language(self):
        _, user_text, _ = render_eval_prompt(py_instance())
        assert "**Worked Example (Python)**" in user_text


class TestParseAnswer:
    CALLERS = [qn("main.<toplevel>"), qn("main.run"), qn("main.helper")]

    def test_format_example(self):
        sheet = parse_answer(
            "1. main.func1, main.func2\n2. main.func3\n3.",
            self.CALLERS,
            Language.PYTHON,
        )
        assert sheet.per_caller == {
            1: frozenset({qn("main.func1"), qn("main.func2")}),
            2: frozenset({qn("main.func3")}),
            3: frozenset(),
        }
        assert sheet.dropped == ()

    def test_preamble_and_missing_index(self):
        sheet = parse_answer(
            "Sure! Here are the answers:\n1. main.f\n",
            self.CALLERS[:2],
            Language.PYTHON,
        )
        assert sheet.per_caller == {1: frozenset({qn("main.f")}), 2: frozenset()}

    def test_duplicates_collapse(self):
        sheet = parse_answer("1. main.f, main.f", self.CALLERS[:1], Language.PYTHON)
        assert sheet.per_caller == {1: frozenset({qn("main.f")})}

    def test_first_occurrence_wins(self):
        sheet = parse_answer(
            "1. main.f\n1. main.g\n", self.CALLERS[:1], Language.PYTHON
        )
        assert sheet.per_caller == {1: frozenset({qn("main.f")})}

    def test_out_of_range_index_ignored(self):
        sheet = parse_answer("7. main.f\n", self.CALLERS[:2], Language.PYTHON)
        assert sheet.per_caller == {1: frozenset(), 2: frozenset()}

    def test_unparseable_names_are_dropped_and_tallied(self):
        sheet = parse_answer(
            "1. main..bad, main.ok\n", self.CALLERS[:1], Language.PYTHON
        )
        assert sheet.per_caller == {1: frozenset({qn("main.ok")})}
        assert sheet.dropped == ("main..bad",)

    def test_backticks_stripped(self):
        sheet = parse_answer("1. `main.f`\n", self.CALLERS[:1], Language.PYTHON)
        assert sheet.per_caller == {1: frozenset({qn("main.f")})}

    def test_requires_callers(self):
        with pytest.raises(ValueError):
            parse_answer("1. main.f", [], Language.PYTHON)

    def test_sheet_indices_must_be_contiguous(self):
        with pytest.raises(ValueError):
            AnswerSheet("p", {1: frozenset(), 3: frozenset()})


class TestScoreProgram:
    def test_gold_as_answers_is_perfect(self):
        callers = render_eval_prompt(py_instance())[2]
        sheet = answers_from_gold(PY_GOLD, callers)
        m = score_program(sheet, PY_GOLD, callers)
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_flexsearch_untaken_branch_vector(self):
        pid = "flexsearch_0003"
        gold_callees = ["is_string", "is_array", "toArray", "concat",
                        "sort_by_length_down"]
        gold = graph(
            Language.JAVASCRIPT,
            pid,
            [(f"{pid}.parse_simple", f"{pid}.{callee}") for callee in gold_callees],
        )
        callers = [qn(f"{pid}.parse_simple", Language.JAVASCRIPT)]
        answer = "1. " + ", ".join(
            f"{pid}.{name}" for name in gold_callees + ["inherit"]
        )
        sheet = parse_answer(answer, callers, Language.JAVASCRIPT)
        m = score_program(sheet, gold, callers)
        assert (m.tp, m.fp, m.fn) == (5, 1, 0)
        assert abs(m.precision - 0.833) <= 0.001
        assert m.recall == 1.0
        assert abs(m.f1 - 0.909) <= 0.001

    def test_all_empty_answers_score_zero(self):
        callers = render_eval_prompt(py_instance())[2]
        sheet = parse_answer("no answers here", callers, Language.PYTHON)
        m = score_program(sheet, PY_GOLD, callers)
        assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
        assert m.fn == len(PY_GOLD.edges)

    def test_java_signatures_ignored_at_comparison(self):
        gold = graph(
            Language.JAVA,
            "p",
            [("Main:main(String[])", "Main:add(int, int)")],
        )
        callers = [qn("Main:main", Language.JAVA)]
        sheet = parse_answer("1. Main:add", callers, Language.JAVA)
        m = score_program(sheet, gold, callers)
        assert (m.tp, m.fp, m.fn) == (1, 0, 0)

    def test_caller_count_mismatch_rejected(self):
        callers = render_eval_prompt(py_instance())[2]
        sheet = parse_answer("1. main.run", callers, Language.PYTHON)
        with pytest.raises(ValueError):
            score_program(sheet, PY_GOLD, callers[:1])


class TestAggregate:
    OPUS = [
        (Language.PYTHON, Metrics.from_ratios(0.737, 0.853, 0.791)),
        (Language.JAVASCRIPT, Metrics.from_ratios(0.585, 0.726, 0.648)),
        (Language.JAVA, Metrics.from_ratios(0.653, 0.877, 0.749)),
    ]

    def test_cross_language_macro_average(self):
        _, overall = aggregate(self.OPUS, pooling="macro")
        assert abs(100 * overall.f1 - 72.9) <= 0.05
        assert abs(100 * overall.precision - 65.8) <= 0.05
        assert abs(100 * overall.recall - 81.9) <= 0.05

    def test_single_language_identity(self):
        m = Metrics.from_counts(4, 1, 1)
        per_language, overall = aggregate([(Language.PYTHON, m)])
        assert per_language == {Language.PYTHON: m}
        assert overall == m

    def test_micro_pooling_sums_counts(self):
        rows = [
            (Language.PYTHON, Metrics.from_counts(1, 1, 0)),
            (Language.PYTHON, Metrics.from_counts(3, 0, 1)),
        ]
        per_language, _ = aggregate(rows, pooling="micro")
        assert per_language[Language.PYTHON] == Metrics.from_counts(4, 1, 1)

    def test_macro_pooling_averages_ratios(self):
        rows = [
            (Language.PYTHON, Metrics.from_counts(1, 1, 0)),
            (Language.PYTHON, Metrics.from_counts(3, 0, 1)),
        ]
        per_language, _ = aggregate(rows, pooling="macro")
        assert per_language[Language.PYTHON].precision == 0.75

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])
        with pytest.raises(ValueError):
            aggregate(self.OPUS, pooling="median")


class TestAnswerIO:
    def test_render_answer_block_round_trips(self):
        callers = render_eval_prompt(py_instance())[2]
        block = render_answer_block(callers, answers_from_gold(PY_GOLD, callers))
        assert block.splitlines()[0].startswith("1. ")
        sheet = parse_answer(block, callers, Language.PYTHON)
        assert score_program(sheet, PY_GOLD, callers).f1 == 1.0

    def test_jsonl_reader(self, tmp_path):
        path = tmp_path / "answers.jsonl"
        path.write_text(
            '{"program_id": "a", "answer": "1. main.f"}\n'
            '\n'
            '{"program_id": "b", "answer": "1."}\n'
        )
        assert read_answers_jsonl(path) == {"a": "1. main.f", "b": "1."}
        (tmp_path / "bad.jsonl").write_text('{"program_id": "a"}\n')
        with pytest.raises(ValueError):
            read_answers_jsonl(tmp_path / "bad.jsonl")

    def test_answer_file_reader(self, tmp_path):
        (tmp_path / "p_a.answer.txt").write_text("1. main.f")
        (tmp_path / "ignored.txt").write_text("x")
        assert read_answer_files(tmp_path) == {"p_a": "1. main.f"}

    def test_write_scores(self, tmp_path):
        m = Metrics.from_counts(4, 1, 1)
        out = tmp_path / "scores.json"
        csv_out = tmp_path / "scores.csv"
        write_scores(
            out,
            {"p_a": (Language.PYTHON, m)},
            {Language.PYTHON: m},
            m,
            csv_path=csv_out,
        )
        doc = json.loads(out.read_text())
        assert doc["overall"]["tp"] == 4
        assert doc["per_program"]["p_a"]["language"] == "python"
        assert abs(doc["per_language"]["python"]["precision"] - 0.8) < 1e-9
        lines = csv_out.read_text().strip().splitlines()
        assert lines[0].startswith("program_id,")
        assert lines[1].startswith("p_a,python,4,1,1,")
