"""Probe injection for the Java subset.

Each method and constructor body gets an entry probe plus try/finally so the
tracer's shadow stack survives returns and exceptions. Instance-method probes
resolve the callee owner through the receiver's runtime class, falling back
to the lexical declaring class when the runtime pairing is not an inventory
member (inherited, not overridden). Constructors and statics always use the
lexical owner; probes in constructors sit after any this()/super() chain call
since nothing may precede it.

The tracer helper class is appended at the end of the same compilation unit
and emits protocol lines to the CALLWITNESS_TRACE_OUT file.
"""

from __future__ import annotations

from ..rewrite import Insertion, InstrumentedSource, apply_insertions
from .parser import TRACER_CLASS, inventory_of, parse_java_unit

JAVA_TOPLEVEL = "Main:<toplevel>"

_TRACER_TEMPLATE = """

class CallwitnessTracer {
    static String[] names = { __CW_NAMES__ };
    static java.util.ArrayList<String> stack = new java.util.ArrayList<String>();
    static boolean started = false;

    static String resolve(String candidate, String fallback) {
        int i = 0;
        while (i < names.length) {
            if (names[i].equals(candidate)) {
                return candidate;
            }
            i = i + 1;
        }
        return fallback;
    }

    static void enter(String callee) {
        String caller = "Main:<toplevel>";
        if (stack.size() > 0) {
            caller = stack.get(stack.size() - 1);
        }
        emit("CALL\\t" + caller + "\\t" + callee + "\\n");
        stack.add(callee);
    }

    static void exit() {
        if (stack.size() > 0) {
            stack.remove(stack.size() - 1);
        }
    }

    static void emit(String text) {
        String path = System.getenv("CALLWITNESS_TRACE_OUT");
        if (path == null || path.isEmpty()) {
            return;
        }
        try {
            java.io.FileWriter writer = new java.io.FileWriter(path, true);
            if (!started) {
                started = true;
                writer.write("CALLWITNESS\\t1\\tjava\\n");
            }
            writer.write(text);
            writer.close();
        } catch (java.io.IOException e) {
            return;
        }
    }
}
"""


def _quote(name: str) -> str:
    # inventory names are identifiers, parens, commas, brackets, spaces,
    # and the <init>/<toplevel> markers; nothing needs escaping
    if '"' in name or "\\" in name:
        raise ValueError(f"unexpected characters in name {name!r}")
    return f'"{name}"'


def instrument_java(source: str) -> InstrumentedSource:
    """Rewrite a compilation unit so execution emits trace events."""
    unit = parse_java_unit(source)
    inventory = inventory_of(unit)  # also enforces the main() entry point
    insertions: list[Insertion] = []
    for cls in unit.classes:
        for ctor in cls.ctors:
            callee = f"{cls.name}:<init>({ctor.signature})"
            insertions.append(
                Insertion(
                    ctor.probe_offset,
                    f" {TRACER_CLASS}.enter({_quote(callee)}); try {{",
                )
            )
            insertions.append(
                Insertion(ctor.body_close, f"}} finally {{ {TRACER_CLASS}.exit(); }} ")
            )
        for method in cls.methods:
            if method.body is None:
                continue
            lexical = f"{cls.name}:{method.name}({method.signature})"
            if method.is_static:
                probe = f"{TRACER_CLASS}.enter({_quote(lexical)}); try {{"
            else:
                member = f"{method.name}({method.signature})"
                probe = (
                    f"{TRACER_CLASS}.enter({TRACER_CLASS}.resolve("
                    f'this.getClass().getSimpleName() + ":{member}", '
                    f"{_quote(lexical)})); try {{"
                )
            insertions.append(Insertion(method.probe_offset, " " + probe))
            insertions.append(
                Insertion(method.body_close, f"}} finally {{ {TRACER_CLASS}.exit(); }} ")
            )
    names = ", ".join(_quote(entry.name.text) for entry in inventory.methods)
    tracer = _TRACER_TEMPLATE.replace("__CW_NAMES__", names)
    insertions.append(Insertion(unit.end_offset, tracer))
    text, applied = apply_insertions(source, "", insertions)
    return InstrumentedSource(
        text=text,
        inventory=inventory,
        prelude_lines=0,
        _prelude_len=0,
        _applied=applied,
    )
