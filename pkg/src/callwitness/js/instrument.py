"""Probe injection for the JavaScript subset.

Every inventory function body gets an entry probe and a try/finally exit so
the shadow call stack stays correct across returns and thrown exceptions.
Trace lines go to the file named by CALLWITNESS_TRACE_OUT; with the variable
unset the probes are no-ops and the program behaves like the original.
"""

from __future__ import annotations

import json

from ..rewrite import Insertion, InstrumentedSource, apply_insertions
from .parser import FunctionInventory, parse_js_functions

_PRELUDE = """\
const __cw_fs = require("fs");
const __cw_out = "CALLWITNESS_TRACE_OUT" in process.env ? process.env.CALLWITNESS_TRACE_OUT : "";
const __cw_stack = [];
let __cw_started = false;
function __cw_emit(text) {
  if (!__cw_out) { return; }
  if (!__cw_started) {
    __cw_started = true;
    __cw_fs.appendFileSync(__cw_out, "CALLWITNESS\\t1\\tjavascript\\n");
  }
  __cw_fs.appendFileSync(__cw_out, text);
}
function __cw_enter(callee) {
  const caller = __cw_stack.length > 0 ? __cw_stack[__cw_stack.length - 1] : __CW_TOPLEVEL__;
  __cw_emit("CALL\\t" + caller + "\\t" + callee + "\\n");
  __cw_stack.push(callee);
}
function __cw_exit() {
  __cw_stack.pop();
}
"""


def js_prelude(module_name: str) -> str:
    toplevel = json.dumps(f"{module_name}.<toplevel>")
    return _PRELUDE.replace("__CW_TOPLEVEL__", toplevel)


def instrument_js(source: str, module_name: str) -> InstrumentedSource:
    """Rewrite source so execution emits one trace event per traced call."""
    fns = parse_js_functions(source, module_name)
    insertions: list[Insertion] = []
    for fn in fns:
        callee = json.dumps(fn.entry.name.text)
        if fn.body_open is not None:
            insertions.append(
                Insertion(fn.body_open + 1, f" __cw_enter({callee}); try {{")
            )
            insertions.append(
                Insertion(fn.body_close, f"}} finally {{ __cw_exit(); }} ")
            )
        else:
            insertions.append(
                Insertion(fn.expr_start, f"{{ __cw_enter({callee}); try {{ return (")
            )
            insertions.append(
                Insertion(fn.expr_end, "); } finally { __cw_exit(); } }")
            )
    prelude = js_prelude(module_name)
    text, applied = apply_insertions(source, prelude, insertions)
    inventory = FunctionInventory(module_name, tuple(f.entry for f in fns))
    return InstrumentedSource(
        text=text,
        inventory=inventory,
        prelude_lines=prelude.count("\n"),
        _prelude_len=len(prelude),
        _applied=applied,
    )
