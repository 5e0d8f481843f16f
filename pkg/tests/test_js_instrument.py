import json
import subprocess

import pytest

from callwitness.errors import UnsupportedConstructError
from callwitness.js.instrument import instrument_js
from callwitness.js.parser import parse_js_subset

MOD = "prog_0001"


def names(source):
    return [e.name.text for e in parse_js_subset(source, MOD).functions]


def kinds(source):
    return [(e.name.text, e.kind) for e in parse_js_subset(source, MOD).functions]


class TestInventory:
    def test_function_declaration(self):
        src = "function is_string(x) {\n  return typeof x === 'string';\n}\n"
        assert names(src) == [f"{MOD}.is_string"]

    def test_arrow_const(self):
        inv = parse_js_subset("const f = (x) => x + 1;\n", MOD)
        assert [(e.name.text, e.kind) for e in inv.functions] == [
            (f"{MOD}.f", "arrow_const")
        ]

    def test_eval_rejected(self):
        with pytest.raises(UnsupportedConstructError):
            parse_js_subset("const x = eval('1+1');\n", MOD)

    def test_class_methods_and_constructor(self):
        src = (
            "class Stack {\n"
            "  constructor() {\n    this.items = [];\n  }\n"
            "  push(v) {\n    this.items.push(v);\n  }\n"
            "  static empty() {\n    return new Stack();\n  }\n"
            "}\n"
        )
        assert kinds(src) == [
            (f"{MOD}.Stack.constructor", "class_constructor"),
            (f"{MOD}.Stack.push", "class_method"),
            (f"{MOD}.Stack.empty", "class_method"),
        ]

    def test_nested_functions_get_path_names(self):
        src = (
            "function outer(n) {\n"
            "  function inner(k) {\n    return k * 2;\n  }\n"
            "  return inner(n);\n"
            "}\n"
        )
        assert names(src) == [f"{MOD}.outer", f"{MOD}.outer.inner"]

    def test_spans_nest(self):
        src = (
            "function outer(n) {\n"
            "  function inner(k) {\n    return k;\n  }\n"
            "  return inner(n);\n"
            "}\n"
        )
        inv = parse_js_subset(src, MOD)
        spans = {e.name.member: e.span for e in inv.functions}
        outer, inner = spans["outer"], spans["inner"]
        assert outer[0] <= inner[0] and inner[1] <= outer[1]

    def test_const_function_expression(self):
        assert kinds("const f = function(x) {\n  return x;\n};\n") == [
            (f"{MOD}.f", "arrow_const")
        ]

    def test_duplicate_names_rejected(self):
        src = "function f() {\n  return 1;\n}\nconst f = () => 2;\n"
        with pytest.raises(UnsupportedConstructError):
            parse_js_subset(src, MOD)


class TestRejections:
    @pytest.mark.parametrize(
        "snippet",
        [
            "with (obj) { x = 1; }\n",
            "import fs from 'fs';\n",
            "export const a = 1;\n",
            "function* gen() { yield 1; }\n",
            "async function f() { return 1; }\n",
            "const p = await q;\n",
            "setTimeout(tick, 10);\n",
            "const fs = require('fs');\n",
            "process.stdout.write('x');\n",
            "const f = function() {}, g = 2;\n",
            "var f = () => 1;\n",
            "numbers.map((x) => x * 2);\n",
            "numbers.forEach(function(x) { show(x); });\n",
            "const { a, b } = pair;\n",
            "const [x, y] = pair;\n",
            "loop: for (;;) { break loop; }\n",
            "const s = tag`hello`;\n",
            "class A { get size() { return 1; } }\n",
            "class A { [key]() { return 1; } }\n",
            "class A { count = 0; }\n",
            "class A { #secret() {} }\n",
            "class A { static { init(); } }\n",
            "const o = { run() { return 1; } };\n",
            "const o = { f: (x) => x };\n",
            "function f() { class B {} }\n",
            "const __cw_x = 1;\n",
            "const t = `${(x) => x}`;\n",
            "const e = `${eval('1')}`;\n",
        ],
    )
    def test_rejected_loudly(self, snippet):
        with pytest.raises(UnsupportedConstructError):
            parse_js_subset(snippet, MOD)

    def test_error_carries_line(self):
        src = "const a = 1;\nconst b = 2;\nsetTimeout(f, 1);\n"
        with pytest.raises(UnsupportedConstructError) as info:
            parse_js_subset(src, MOD)
        assert info.value.line == 3

    @pytest.mark.parametrize(
        "snippet",
        [
            "const re = /a+b/g;\nconst n = 10 / 2;\n",
            "const s = `total: ${count(items)}`;\n",
            "function f(...rest) {\n  return rest.length;\n}\n",
            "const merged = base.concat(...extras);\n",
            "const o = { a: 1, b: two, c };\n",
            "for (const [k, v] of pairs) {\n  show(k, v);\n}\n",
            "let total = 0\ntotal += 1\nshow(total)\n",
            "switch (x) {\ncase 1:\n  f();\n  break;\ndefault:\n  g();\n}\n",
            "try {\n  risky();\n} catch (err) {\n  handle(err);\n}\n",
            "do {\n  step();\n} while (more());\n",
            "class A {}\nclass B extends A {}\n",
            "const x = cond ? left : right;\n",
        ],
    )
    def test_accepted(self, snippet):
        parse_js_subset(snippet, MOD)


class TestInstrument:
    def test_strip_recovers_source(self):
        src = (
            "function f(x) {\n  return g(x) + 1;\n}\n"
            "function g(x) {\n  return x * 2;\n}\n"
            "const h = (x) => f(x);\n"
            "console.log(h(3));\n"
        )
        out = instrument_js(src, MOD)
        assert out.strip() == src
        assert out.text != src
        assert out.prelude_lines > 0

    def test_probe_per_function(self):
        src = "function f() {\n  return 1;\n}\nconst g = () => 2;\n"
        out = instrument_js(src, MOD)
        assert out.text.count("__cw_enter(") >= 3  # prelude definition + 2 probes
        assert f'__cw_enter("{MOD}.f")' in out.text
        assert f'__cw_enter("{MOD}.g")' in out.text

    def test_empty_body_stays_valid(self):
        out = instrument_js("function noop() {}\nnoop();\n", MOD)
        subprocess.run(
            ["node", "--check", "-"], input=out.text, text=True, check=True, timeout=30
        )


def run_traced(tmp_path, source):
    out = instrument_js(source, MOD)
    program = tmp_path / f"{MOD}.js"
    program.write_text(out.text, encoding="utf-8")
    trace = tmp_path / "trace.log"
    env = {"PATH": "/usr/bin:/bin", "CALLWITNESS_TRACE_OUT": str(trace)}
    proc = subprocess.run(
        ["node", str(program)], capture_output=True, text=True, env=env, timeout=30
    )
    lines = trace.read_text(encoding="utf-8").splitlines() if trace.exists() else []
    return proc, lines


class TestRuntimeBehavior:
    def test_toplevel_and_nested_edges(self, tmp_path):
        src = (
            "function f(x) {\n  return g(x) + 1;\n}\n"
            "function g(x) {\n  return x * 2;\n}\n"
            "console.log(f(3));\n"
        )
        proc, lines = run_traced(tmp_path, src)
        assert proc.returncode == 0
        assert proc.stdout == "7\n"
        assert lines[0] == "CALLWITNESS\t1\tjavascript"
        calls = {tuple(line.split("\t")[1:]) for line in lines[1:]}
        assert calls == {
            (f"{MOD}.<toplevel>", f"{MOD}.f"),
            (f"{MOD}.f", f"{MOD}.g"),
        }

    def test_exception_unwinds_shadow_stack(self, tmp_path):
        src = (
            "function boom() {\n  throw new Error('no');\n}\n"
            "function safe() {\n  try {\n    boom();\n  } catch (e) {\n    return 1;\n  }\n  return 0;\n}\n"
            "function after() {\n  return 2;\n}\n"
            "safe();\nafter();\n"
        )
        proc, lines = run_traced(tmp_path, src)
        assert proc.returncode == 0
        calls = {tuple(line.split("\t")[1:]) for line in lines[1:]}
        # after() runs once boom/safe have popped: caller must be toplevel
        assert (f"{MOD}.<toplevel>", f"{MOD}.after") in calls
        assert (f"{MOD}.safe", f"{MOD}.boom") in calls

    def test_comparator_callback_attribution(self, tmp_path):
        src = (
            "function sort_by_length_down(a, b) {\n  return b.length - a.length;\n}\n"
            "function parse_simple(words) {\n  return words.sort(sort_by_length_down);\n}\n"
            "console.log(parse_simple(['aa', 'b', 'ccc']).join(','));\n"
        )
        proc, lines = run_traced(tmp_path, src)
        assert proc.returncode == 0
        assert proc.stdout == "ccc,aa,b\n"
        calls = {tuple(line.split("\t")[1:]) for line in lines[1:]}
        assert (f"{MOD}.parse_simple", f"{MOD}.sort_by_length_down") in calls

    def test_stdout_identical_without_trace_env(self, tmp_path):
        src = "function f() {\n  return 'ok';\n}\nconsole.log(f());\n"
        out = instrument_js(src, MOD)
        orig = tmp_path / "orig.js"
        inst = tmp_path / "inst.js"
        orig.write_text(src, encoding="utf-8")
        inst.write_text(out.text, encoding="utf-8")
        env = {"PATH": "/usr/bin:/bin"}
        r1 = subprocess.run(["node", str(orig)], capture_output=True, env=env, timeout=30)
        r2 = subprocess.run(["node", str(inst)], capture_output=True, env=env, timeout=30)
        assert r1.stdout == r2.stdout

    def test_recursion_self_edge(self, tmp_path):
        src = (
            "function fact(n) {\n  return n <= 1 ? 1 : n * fact(n - 1);\n}\n"
            "console.log(fact(3));\n"
        )
        proc, lines = run_traced(tmp_path, src)
        assert proc.stdout == "6\n"
        calls = [tuple(line.split("\t")[1:]) for line in lines[1:]]
        assert calls.count((f"{MOD}.fact", f"{MOD}.fact")) == 2  # fact(2), fact(1)
        assert (f"{MOD}.<toplevel>", f"{MOD}.fact") in calls

    def test_class_dispatch(self, tmp_path):
        src = (
            "class Animal {\n"
            "  speak() {\n    return 'generic';\n  }\n"
            "}\n"
            "class Dog extends Animal {\n"
            "  speak() {\n    return 'woof';\n  }\n"
            "}\n"
            "function describe(a) {\n  return a.speak();\n}\n"
            "console.log(describe(new Dog()));\n"
        )
        proc, lines = run_traced(tmp_path, src)
        assert proc.stdout == "woof\n"
        calls = {tuple(line.split("\t")[1:]) for line in lines[1:]}
        assert (f"{MOD}.describe", f"{MOD}.Dog.speak") in calls
        assert (f"{MOD}.describe", f"{MOD}.Animal.speak") not in calls

    def test_expression_arrow_probe(self, tmp_path):
        src = "const double = (x) => x * 2;\nconsole.log(double(4));\n"
        proc, lines = run_traced(tmp_path, src)
        assert proc.stdout == "8\n"
        calls = {tuple(line.split("\t")[1:]) for line in lines[1:]}
        assert (f"{MOD}.<toplevel>", f"{MOD}.double") in calls
