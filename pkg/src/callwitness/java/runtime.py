"""Pure-Python runtime for the Java subset.

Stands in for a JVM when none is installed: parses a .java file and runs it
with Java semantics for the supported surface (integer arithmetic with
truncating division and overflow on narrowing stores, virtual dispatch by
runtime class, lazy per-class static initialization, the exception hierarchy,
and the java.util/java.io pieces the subset admits). Instrumented programs run
unchanged; the tracer class they carry is ordinary code to this interpreter.

Usable as a module: `python -m callwitness.java.runtime Program.java`. Exit
codes mirror a java launcher: 0 on success, 1 on an uncaught exception or a
runtime-rejected operation, 2 when the file does not parse or link.

Known divergences, all deterministic: strings compare equal under == when
their contents match, HashMap iterates in insertion order, default toString
hashes are sequential allocation ids, integer expressions only overflow when
stored into an int-typed location (Java also wraps mid-expression), and the
shift operators always use int width (shift counts mask to 5 bits).
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from functools import cmp_to_key

from ..errors import UnsupportedConstructError
from .parser import (
    ArrayLit,
    Assign,
    Binary,
    Block,
    Break,
    Call,
    Cast,
    ClassDecl,
    CompilationUnit,
    Continue,
    Delegate,
    DoWhile,
    ExprStmt,
    FieldGet,
    For,
    ForEach,
    If,
    Index,
    InstanceOf,
    Literal,
    LocalVar,
    Name,
    New,
    NewArray,
    Return,
    Switch,
    Ternary,
    This,
    Throw,
    Try,
    Unary,
    While,
    parse_java_unit,
)

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1

MAX_CALL_DEPTH = 1200

# name -> parent; user classes may extend any of these
EXCEPTION_TREE = {
    "Throwable": None,
    "Exception": "Throwable",
    "Error": "Throwable",
    "RuntimeException": "Exception",
    "IOException": "Exception",
    "ArithmeticException": "RuntimeException",
    "NullPointerException": "RuntimeException",
    "ClassCastException": "RuntimeException",
    "IllegalArgumentException": "RuntimeException",
    "NumberFormatException": "IllegalArgumentException",
    "IllegalStateException": "RuntimeException",
    "UnsupportedOperationException": "RuntimeException",
    "NegativeArraySizeException": "RuntimeException",
    "IndexOutOfBoundsException": "RuntimeException",
    "ArrayIndexOutOfBoundsException": "IndexOutOfBoundsException",
    "StringIndexOutOfBoundsException": "IndexOutOfBoundsException",
    "StackOverflowError": "Error",
}

_JAVA_IO_EXCEPTIONS = {"IOException"}

INTEGRAL_TYPES = {"int", "long", "short", "byte"}
FLOAT_TYPES = {"double", "float"}


def wrap32(v: int) -> int:
    return ((v + 2**31) % 2**32) - 2**31


def wrap64(v: int) -> int:
    return ((v + 2**63) % 2**64) - 2**63


def exception_fqname(name: str) -> str:
    if name in _JAVA_IO_EXCEPTIONS:
        return "java.io." + name
    if name in EXCEPTION_TREE:
        return "java.lang." + name
    return name


def normalize_type(name: str) -> str:
    """Erase java.lang/java.util/java.io qualification on well-known names."""
    for prefix in ("java.lang.", "java.util.", "java.io."):
        if name.startswith(prefix):
            return name[len(prefix) :]
    return name


class JavaFault(Exception):
    """Interpreter-level failure: unknown member, bad linkage, and the like."""


class UnsupportedOp(Exception):
    """Runtime-rejected operation (System.exit, Math.random, clocks)."""


class JavaThrow(Exception):
    def __init__(self, obj: "JObject"):
        super().__init__(obj.rclass.name)
        self.obj = obj


class BreakSignal(Exception):
    pass


class ContinueSignal(Exception):
    pass


class ReturnSignal(Exception):
    def __init__(self, value):
        super().__init__()
        self.value = value


class JChar:
    """A java char: prints as a character, computes as a code unit."""

    __slots__ = ("ch",)

    def __init__(self, ch: str):
        self.ch = ch

    def __eq__(self, other):
        if isinstance(other, JChar):
            return self.ch == other.ch
        return NotImplemented

    def __hash__(self):
        return hash(("jchar", self.ch))

    def __repr__(self):
        return f"JChar({self.ch!r})"


class JArray:
    __slots__ = ("elem_type", "data")

    def __init__(self, elem_type: str, data: list):
        self.elem_type = elem_type
        self.data = data


class JList:
    __slots__ = ("data",)

    def __init__(self, data=None):
        self.data = list(data) if data is not None else []


class JMap:
    __slots__ = ("data",)

    def __init__(self):
        self.data = {}


class JMapEntry:
    __slots__ = ("key", "value")

    def __init__(self, key, value):
        self.key = key
        self.value = value


class JStringBuilder:
    __slots__ = ("parts",)

    def __init__(self, initial: str = ""):
        self.parts = [initial] if initial else []

    def value(self) -> str:
        text = "".join(self.parts)
        self.parts = [text] if text else []
        return text


class JFileWriter:
    __slots__ = ("handle", "path")

    def __init__(self, handle, path: str):
        self.handle = handle
        self.path = path


class JPrintStream:
    __slots__ = ("stream",)

    def __init__(self, stream):
        self.stream = stream


class JClass:
    """Result of getClass(): just enough identity for name queries."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class ClassRef:
    """A bare class name in expression position (static member access)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class RClass:
    """Runtime class: declaration, linked parent, interface closure, statics."""

    def __init__(self, decl: ClassDecl | None, name: str):
        self.decl = decl
        self.name = name
        self.parent: RClass | None = None
        self.interfaces: set[str] = set()
        self.field_types: dict[str, str] = {}  # instance fields, chain-merged
        self.static_types: dict[str, str] = {}  # this class's own statics
        self.statics: dict[str, object] = {}
        self.initialized = False

    def chain(self):
        cls = self
        while cls is not None:
            yield cls
            cls = cls.parent

    def is_subclass_of(self, name: str) -> bool:
        return any(c.name == name for c in self.chain())


class JObject:
    __slots__ = ("rclass", "fields", "seq")

    def __init__(self, rclass: RClass, seq: int):
        self.rclass = rclass
        self.fields = {}
        self.seq = seq


class _VarCell:
    __slots__ = ("type_name", "value")

    def __init__(self, type_name: str, value):
        self.type_name = type_name
        self.value = value


class Frame:
    __slots__ = ("scopes", "this_obj", "owner")

    def __init__(self, owner: RClass | None, this_obj: JObject | None):
        self.scopes = [{}]
        self.this_obj = this_obj
        self.owner = owner

    def push(self):
        self.scopes.append({})

    def pop(self):
        self.scopes.pop()

    def declare(self, name: str, type_name: str, value):
        self.scopes[-1][name] = _VarCell(type_name, value)

    def find(self, name: str) -> _VarCell | None:
        for scope in reversed(self.scopes):
            cell = scope.get(name)
            if cell is not None:
                return cell
        return None


def _is_number(v) -> bool:
    return (isinstance(v, int) and not isinstance(v, bool)) or isinstance(
        v, (float, JChar)
    )


def _num(v):
    if isinstance(v, JChar):
        return ord(v.ch)
    return v


def _double_str(v: float) -> str:
    """Java's Double.toString: shortest round-trip, E-form outside [1e-3, 1e7)."""
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if v == 0.0:
        return "-0.0" if math.copysign(1.0, v) < 0 else "0.0"
    sign = "-" if v < 0 else ""
    a = abs(v)
    if 1e-3 <= a < 1e7:
        return sign + repr(a)
    r = repr(a)
    if "e" in r:
        mant, _, exp_s = r.partition("e")
        dec_exp = int(exp_s)
        digits = mant.replace(".", "")
    else:
        whole, _, frac = r.partition(".")
        if whole != "0":
            dec_exp = len(whole) - 1
            digits = whole + frac
        else:
            stripped = frac.lstrip("0")
            dec_exp = -(len(frac) - len(stripped)) - 1
            digits = stripped
    digits = digits.rstrip("0") or "0"
    head, tail = digits[0], digits[1:] or "0"
    return f"{sign}{head}.{tail}E{dec_exp}"


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def _trunc_mod(a: int, b: int) -> int:
    r = abs(a) % abs(b)
    return -r if a < 0 else r


def _java_trim(s: str) -> str:
    start = 0
    end = len(s)
    while start < end and s[start] <= " ":
        start += 1
    while end > start and s[end - 1] <= " ":
        end -= 1
    return s[start:end]


def _string_hash(s: str) -> int:
    h = 0
    for c in s:
        h = wrap32(h * 31 + ord(c))
    return h


_MISSING = object()


class Interpreter:
    def __init__(self, unit: CompilationUnit):
        self.unit = unit
        self.classes: dict[str, RClass] = {}
        self.interface_extends: dict[str, list[str]] = {}
        self.depth = 0
        self.seq = 0
        self.out = JPrintStream(sys.stdout)
        self.err = JPrintStream(sys.stderr)
        self._link()

    # linking

    def _link(self):
        for decl in self.unit.interfaces:
            self.interface_extends[decl.name] = list(decl.extends)
        for decl in self.unit.classes:
            self.classes[decl.name] = RClass(decl, decl.name)
        self.exc_classes: dict[str, RClass] = {}
        for name in EXCEPTION_TREE:
            self.exc_classes[name] = RClass(None, name)
        for name, parent in EXCEPTION_TREE.items():
            if parent is not None:
                self.exc_classes[name].parent = self.exc_classes[parent]
        for rc in self.classes.values():
            sup = rc.decl.superclass
            if sup is not None:
                sup = normalize_type(sup)
                if sup in self.classes:
                    rc.parent = self.classes[sup]
                elif sup in self.exc_classes:
                    rc.parent = self.exc_classes[sup]
                elif sup == "Object":
                    rc.parent = None
                else:
                    raise JavaFault(f"unknown superclass {sup} of {rc.name}")
        for rc in self.classes.values():
            seen = set()
            cur = rc
            while cur is not None:
                if cur.name in seen:
                    raise JavaFault(f"inheritance cycle at {cur.name}")
                seen.add(cur.name)
                cur = cur.parent
        for rc in self.classes.values():
            rc.interfaces = self._interface_closure(rc)
            rc.field_types = self._merge_field_types(rc)
            decl_statics = {}
            for f in rc.decl.fields:
                if f.is_static:
                    for fname, _ in f.declarators:
                        decl_statics[fname] = f.type_name
            rc.static_types = decl_statics

    def _interface_closure(self, rc: RClass) -> set[str]:
        out: set[str] = set()
        pending = []
        for cls in rc.chain():
            if cls.decl is not None:
                pending.extend(normalize_type(i) for i in cls.decl.interfaces)
        while pending:
            iface = pending.pop()
            if iface in out:
                continue
            out.add(iface)
            pending.extend(
                normalize_type(i) for i in self.interface_extends.get(iface, [])
            )
        return out

    def _merge_field_types(self, rc: RClass) -> dict[str, str]:
        merged: dict[str, str] = {}
        for cls in reversed(list(rc.chain())):
            if cls.decl is None:
                continue
            for f in cls.decl.fields:
                if not f.is_static:
                    for fname, _ in f.declarators:
                        merged[fname] = f.type_name
        return merged

    # identity + class init

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def ensure_init(self, rc: RClass):
        if rc.initialized or rc.decl is None:
            return
        rc.initialized = True
        if rc.parent is not None:
            self.ensure_init(rc.parent)
        for fname, ftype in rc.static_types.items():
            rc.statics[fname] = self._default_value(ftype)
        frame = Frame(rc, None)
        for f in rc.decl.fields:
            if not f.is_static:
                continue
            for fname, init in f.declarators:
                if init is not None:
                    rc.statics[fname] = self._init_value(f.type_name, init, frame)

    def _default_value(self, type_name: str):
        if type_name in INTEGRAL_TYPES:
            return 0
        if type_name in FLOAT_TYPES:
            return 0.0
        if type_name == "boolean":
            return False
        if type_name == "char":
            return JChar("\x00")
        return None

    # coercion to declared types

    def _coerce(self, type_name: str, value):
        if type_name in INTEGRAL_TYPES:
            if isinstance(value, JChar):
                return ord(value.ch)
            if isinstance(value, bool):
                return value
            if isinstance(value, float):
                return self._double_to_int(value, type_name)
            if isinstance(value, int):
                return wrap64(value) if type_name == "long" else wrap32(value)
            return value
        if type_name in FLOAT_TYPES:
            if isinstance(value, bool):
                return value
            if isinstance(value, int):
                return float(value)
            if isinstance(value, JChar):
                return float(ord(value.ch))
            return value
        if type_name == "char":
            if isinstance(value, int) and not isinstance(value, bool):
                return JChar(chr(value & 0xFFFF))
            return value
        return value

    def _double_to_int(self, v: float, target: str) -> int:
        if math.isnan(v):
            return 0
        if target == "long":
            lo, hi = -(2**63), 2**63 - 1
        else:
            lo, hi = INT_MIN, INT_MAX
        if math.isinf(v):
            return hi if v > 0 else lo
        t = int(v)
        return max(lo, min(hi, t))

    def _init_value(self, type_name: str, node, frame: Frame):
        if isinstance(node, ArrayLit):
            return self._build_array_lit(type_name, node, frame)
        return self._coerce(type_name, self.eval(node, frame))

    def _build_array_lit(self, type_name: str, node: ArrayLit, frame: Frame) -> JArray:
        if not type_name.endswith("[]"):
            raise JavaFault(f"array initializer for non-array type {type_name}")
        elem = type_name[:-2]
        data = [self._init_value(elem, e, frame) for e in node.elems]
        return JArray(elem, data)

    # exceptions

    def make_exc(self, name: str, message: str | None) -> JObject:
        obj = JObject(self.exc_classes[name], self.next_seq())
        obj.fields["message"] = message
        return obj

    def throw(self, name: str, message: str | None):
        raise JavaThrow(self.make_exc(name, message))

    def throwable_str(self, obj: JObject) -> str:
        text = self._user_to_string(obj)
        if text is not None:
            return text
        msg = obj.fields.get("message")
        fq = exception_fqname(obj.rclass.name)
        return fq if msg is None else f"{fq}: {self.java_str(msg)}"

    def _is_throwable(self, value) -> bool:
        return isinstance(value, JObject) and any(
            c.name in EXCEPTION_TREE for c in value.rclass.chain()
        )

    # stringification

    def java_str(self, v) -> str:
        if v is None:
            return "null"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return v
        if isinstance(v, JChar):
            return v.ch
        if isinstance(v, int):
            return str(v)
        if isinstance(v, float):
            return _double_str(v)
        if isinstance(v, JStringBuilder):
            return v.value()
        if isinstance(v, JList):
            return "[" + ", ".join(self.java_str(e) for e in v.data) + "]"
        if isinstance(v, JMap):
            inner = ", ".join(
                f"{self.java_str(k)}={self.java_str(val)}" for k, val in v.data.values()
            )
            return "{" + inner + "}"
        if isinstance(v, JMapEntry):
            return f"{self.java_str(v.key)}={self.java_str(v.value)}"
        if isinstance(v, JArray):
            return f"{_array_type_code(v.elem_type)}@{self.next_seq():x}"
        if isinstance(v, JClass):
            return f"class {v.name}"
        if isinstance(v, JObject):
            text = self._user_to_string(v)
            if text is not None:
                return text
            if any(c.name in EXCEPTION_TREE for c in v.rclass.chain()):
                return self.throwable_str_default(v)
            return f"{v.rclass.name}@{v.seq:x}"
        raise JavaFault(f"cannot stringify {type(v).__name__}")

    def throwable_str_default(self, obj: JObject) -> str:
        msg = obj.fields.get("message")
        fq = exception_fqname(obj.rclass.name)
        return fq if msg is None else f"{fq}: {self.java_str(msg)}"

    def _user_to_string(self, obj: JObject):
        found = self._find_method(obj.rclass, "toString", [])
        if found is None:
            return None
        rc, method = found
        result = self.invoke(rc, method, obj, [])
        return self.java_str(result)

    # method lookup + invocation

    def _find_method(self, rc: RClass, name: str, args: list):
        # keep walking past a class whose same-arity overloads don't fit the
        # argument types; a parent may hold the matching overload
        fallback = None
        for cls in rc.chain():
            if cls.decl is None:
                continue
            candidates = [
                m
                for m in cls.decl.methods
                if m.name == name and not m.is_abstract and len(m.params) == len(args)
            ]
            if not candidates:
                continue
            best = self._pick_overload(candidates, args)
            if best is not None:
                return cls, best
            if fallback is None:
                fallback = (cls, candidates[0])
        return fallback

    def _pick_overload(self, candidates, args):
        """Best type-compatible overload, or None when none fits."""
        best = None
        best_score = -1.0
        for m in candidates:
            score = 0.0
            ok = True
            for p, a in zip(m.params, args):
                s = self._match_score(p.type_name, a)
                if s is None:
                    ok = False
                    break
                score += s
            if ok and score > best_score:
                best = m
                best_score = score
        return best

    def _match_score(self, type_name: str, value):
        t = normalize_type(type_name)
        if t in INTEGRAL_TYPES:
            if isinstance(value, bool):
                return None
            if isinstance(value, int):
                return 2.0
            if isinstance(value, JChar):
                return 1.0
            return None
        if t in FLOAT_TYPES:
            if isinstance(value, bool):
                return None
            if isinstance(value, float):
                return 2.0
            if isinstance(value, (int, JChar)):
                return 1.0
            return None
        if t == "boolean":
            return 2.0 if isinstance(value, bool) else None
        if t == "char":
            return 2.0 if isinstance(value, JChar) else None
        if value is None:
            return 1.0 if t not in INTEGRAL_TYPES | FLOAT_TYPES else None
        if t == "String":
            return 2.0 if isinstance(value, str) else None
        if t == "Object":
            return 0.5
        if t.endswith("[]"):
            return 2.0 if isinstance(value, JArray) else None
        if t in ("List", "ArrayList", "Iterable", "Collection"):
            return 2.0 if isinstance(value, JList) else None
        if t in ("Map", "HashMap"):
            return 2.0 if isinstance(value, JMap) else None
        if t == "StringBuilder":
            return 2.0 if isinstance(value, JStringBuilder) else None
        if isinstance(value, JObject):
            if value.rclass.name == t:
                return 2.0
            if value.rclass.is_subclass_of(t) or t in value.rclass.interfaces:
                return 1.0
            return None
        if t in self.interface_extends or t in self.classes:
            return None
        return 0.5  # unknown declared type; do not veto

    def invoke(self, rc: RClass, method, this_obj: JObject | None, args: list):
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            self.depth -= 1
            self.throw("StackOverflowError", None)
        try:
            frame = Frame(rc, this_obj)
            for p, a in zip(method.params, args):
                frame.declare(p.name, p.type_name, self._coerce(p.type_name, a))
            try:
                self.exec_block(method.body, frame)
            except ReturnSignal as r:
                if method.return_type == "void":
                    return None
                return self._coerce(method.return_type, r.value)
            return None
        finally:
            self.depth -= 1

    def invoke_virtual(self, obj: JObject, name: str, args: list):
        found = self._find_method(obj.rclass, name, args)
        if found is None:
            return self._object_fallback(obj, name, args)
        rc, method = found
        if method.is_static:
            pass  # statics reachable through instances in java; allow
        return self.invoke(rc, method, obj if not method.is_static else None, args)

    def _object_fallback(self, obj: JObject, name: str, args: list):
        exceptional = any(c.name in EXCEPTION_TREE for c in obj.rclass.chain())
        if name == "getMessage" and not args and exceptional:
            return obj.fields.get("message")
        if name == "toString" and not args:
            return self.java_str(obj)
        if name == "equals" and len(args) == 1:
            return obj is args[0]
        if name == "hashCode" and not args:
            return wrap32(obj.seq)
        if name == "getClass" and not args:
            return JClass(obj.rclass.name)
        raise JavaFault(f"no method {name}/{len(args)} on {obj.rclass.name}")

    # construction

    def construct(self, rc: RClass, args: list, line: int = 0) -> JObject:
        if rc.decl is None:
            raise JavaFault(f"cannot instantiate {rc.name}")
        if rc.decl.is_abstract:
            raise JavaFault(f"cannot instantiate abstract class {rc.name}")
        self.ensure_init(rc)
        obj = JObject(rc, self.next_seq())
        for fname, ftype in rc.field_types.items():
            obj.fields[fname] = self._default_value(ftype)
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            self.depth -= 1
            self.throw("StackOverflowError", None)
        try:
            self._run_ctor(rc, obj, args)
        finally:
            self.depth -= 1
        return obj

    def _run_ctor(self, rc: RClass, obj: JObject, args: list):
        if rc.decl is None:
            # builtin exception superclass: adopt the message argument
            if args:
                obj.fields["message"] = args[0]
            return
        self.ensure_init(rc)
        ctors = [c for c in rc.decl.ctors if len(c.params) == len(args)]
        if not ctors and rc.decl.ctors:
            raise JavaFault(f"no {rc.name} constructor takes {len(args)} arguments")
        if not ctors:
            if args:
                raise JavaFault(f"no {rc.name} constructor takes {len(args)} arguments")
            if rc.parent is not None:
                self._run_ctor(rc.parent, obj, [])
            self._run_field_inits(rc, obj)
            return
        ctor = ctors[0] if len(ctors) == 1 else self._pick_ctor(ctors, args)
        frame = Frame(rc, obj)
        for p, a in zip(ctor.params, args):
            frame.declare(p.name, p.type_name, self._coerce(p.type_name, a))
        deleg = ctor.delegation
        if deleg is not None and deleg.kind == "this":
            dargs = [self.eval(a, frame) for a in deleg.args]
            self._run_ctor(rc, obj, dargs)
        else:
            dargs = []
            if deleg is not None:
                dargs = [self.eval(a, frame) for a in deleg.args]
            if rc.parent is not None:
                self._run_ctor(rc.parent, obj, dargs)
            elif dargs:
                raise JavaFault(f"{rc.name} has no superclass constructor for super()")
            self._run_field_inits(rc, obj)
        try:
            self.exec_block(ctor.body, frame)
        except ReturnSignal:
            pass

    def _pick_ctor(self, ctors, args):
        best = None
        best_score = -1.0
        for c in ctors:
            score = 0.0
            ok = True
            for p, a in zip(c.params, args):
                s = self._match_score(p.type_name, a)
                if s is None:
                    ok = False
                    break
                score += s
            if ok and score > best_score:
                best = c
                best_score = score
        return best if best is not None else ctors[0]

    def _run_field_inits(self, rc: RClass, obj: JObject):
        frame = Frame(rc, obj)
        for f in rc.decl.fields:
            if f.is_static:
                continue
            for fname, init in f.declarators:
                if init is not None:
                    obj.fields[fname] = self._init_value(f.type_name, init, frame)

    # statement execution

    def exec_block(self, block: Block, frame: Frame):
        frame.push()
        try:
            for stmt in block.stmts:
                self.exec(stmt, frame)
        finally:
            frame.pop()

    def exec(self, stmt, frame: Frame):
        kind = type(stmt)
        if kind is ExprStmt:
            self.eval(stmt.expr, frame)
        elif kind is LocalVar:
            for name, init in stmt.declarators:
                if init is None:
                    value = self._default_value(stmt.type_name)
                else:
                    value = self._init_value(stmt.type_name, init, frame)
                frame.declare(name, stmt.type_name, value)
        elif kind is If:
            if self._truth(self.eval(stmt.cond, frame)):
                self.exec(stmt.then, frame)
            elif stmt.orelse is not None:
                self.exec(stmt.orelse, frame)
        elif kind is Block:
            self.exec_block(stmt, frame)
        elif kind is While:
            while self._truth(self.eval(stmt.cond, frame)):
                try:
                    self.exec(stmt.body, frame)
                except BreakSignal:
                    break
                except ContinueSignal:
                    continue
        elif kind is DoWhile:
            while True:
                try:
                    self.exec(stmt.body, frame)
                except BreakSignal:
                    break
                except ContinueSignal:
                    pass
                if not self._truth(self.eval(stmt.cond, frame)):
                    break
        elif kind is For:
            self._exec_for(stmt, frame)
        elif kind is ForEach:
            self._exec_foreach(stmt, frame)
        elif kind is Return:
            value = None if stmt.expr is None else self.eval(stmt.expr, frame)
            raise ReturnSignal(value)
        elif kind is Break:
            raise BreakSignal()
        elif kind is Continue:
            raise ContinueSignal()
        elif kind is Throw:
            value = self.eval(stmt.expr, frame)
            if value is None:
                self.throw("NullPointerException", None)
            if not self._is_throwable(value):
                raise JavaFault("throw of a non-throwable value")
            raise JavaThrow(value)
        elif kind is Try:
            self._exec_try(stmt, frame)
        elif kind is Switch:
            self._exec_switch(stmt, frame)
        elif kind is Delegate:
            raise JavaFault("constructor delegation outside a constructor")
        else:
            raise JavaFault(f"cannot execute {kind.__name__}")

    def _truth(self, v) -> bool:
        if isinstance(v, bool):
            return v
        raise JavaFault("condition is not boolean")

    def _exec_for(self, stmt: For, frame: Frame):
        frame.push()
        try:
            if isinstance(stmt.init, LocalVar):
                self.exec(stmt.init, frame)
            elif isinstance(stmt.init, list):
                for e in stmt.init:
                    self.eval(e, frame)
            while stmt.cond is None or self._truth(self.eval(stmt.cond, frame)):
                try:
                    self.exec(stmt.body, frame)
                except BreakSignal:
                    break
                except ContinueSignal:
                    pass
                for u in stmt.updates:
                    self.eval(u, frame)
        finally:
            frame.pop()

    def _exec_foreach(self, stmt: ForEach, frame: Frame):
        iterable = self.eval(stmt.iterable, frame)
        if iterable is None:
            self.throw("NullPointerException", None)
        if isinstance(iterable, JArray):
            items = list(iterable.data)
        elif isinstance(iterable, JList):
            items = list(iterable.data)
        else:
            raise JavaFault("for-each needs an array or a List")
        for item in items:
            frame.push()
            try:
                frame.declare(stmt.var, stmt.type_name, self._coerce(stmt.type_name, item))
                try:
                    self.exec(stmt.body, frame)
                except ContinueSignal:
                    continue
                except BreakSignal:
                    break
            finally:
                frame.pop()

    def _exec_try(self, stmt: Try, frame: Frame):
        try:
            self.exec_block(stmt.block, frame)
        except JavaThrow as thrown:
            for catch in stmt.catches:
                if self._catch_matches(catch.type_name, thrown.obj):
                    frame.push()
                    try:
                        frame.declare(catch.var, catch.type_name, thrown.obj)
                        for inner in catch.block.stmts:
                            self.exec(inner, frame)
                    finally:
                        frame.pop()
                    break
            else:
                raise
        finally:
            if stmt.finally_block is not None:
                self.exec_block(stmt.finally_block, frame)

    def _catch_matches(self, type_name: str, obj: JObject) -> bool:
        target = normalize_type(type_name)
        return obj.rclass.is_subclass_of(target)

    def _exec_switch(self, stmt: Switch, frame: Frame):
        subject = self.eval(stmt.expr, frame)
        start = None
        default = None
        for idx, (label, _) in enumerate(stmt.cases):
            if label is None:
                default = idx
                continue
            if self._java_eq(subject, self.eval(label, frame)):
                start = idx
                break
        if start is None:
            start = default
        if start is None:
            return
        try:
            for _, stmts in stmt.cases[start:]:
                for inner in stmts:
                    self.exec(inner, frame)
        except BreakSignal:
            pass

    # expression evaluation

    def eval(self, node, frame: Frame):
        kind = type(node)
        if kind is Literal:
            if node.jtype == "int":
                return wrap32(node.value)
            if node.jtype == "long":
                return wrap64(node.value)
            if node.jtype == "char":
                return JChar(node.value)
            return node.value
        if kind is Name:
            return self._eval_name(node, frame)
        if kind is This:
            if frame.this_obj is None:
                raise JavaFault("this in a static context")
            return frame.this_obj
        if kind is Binary:
            return self._eval_binary(node, frame)
        if kind is Call:
            return self._eval_call(node, frame)
        if kind is FieldGet:
            return self._eval_fieldget(node, frame)
        if kind is Index:
            arr = self.eval(node.arr, frame)
            idx = self.eval(node.idx, frame)
            return self._array_get(arr, idx)
        if kind is Assign:
            return self._eval_assign(node, frame)
        if kind is Unary:
            return self._eval_unary(node, frame)
        if kind is Ternary:
            if self._truth(self.eval(node.cond, frame)):
                return self.eval(node.then, frame)
            return self.eval(node.orelse, frame)
        if kind is New:
            return self._eval_new(node, frame)
        if kind is NewArray:
            return self._eval_new_array(node, frame)
        if kind is Cast:
            return self._eval_cast(node, frame)
        if kind is InstanceOf:
            value = self.eval(node.expr, frame)
            return self._instance_of(value, node.type_name)
        if kind is ArrayLit:
            raise JavaFault("array initializer outside a declaration")
        raise JavaFault(f"cannot evaluate {kind.__name__}")

    def _eval_name(self, node: Name, frame: Frame):
        cell = frame.find(node.ident)
        if cell is not None:
            return cell.value
        if frame.this_obj is not None and node.ident in frame.this_obj.fields:
            return frame.this_obj.fields[node.ident]
        if frame.owner is not None:
            for cls in frame.owner.chain():
                if node.ident in cls.static_types:
                    self.ensure_init(cls)
                    return cls.statics[node.ident]
        resolved = self._resolve_class_name(node.ident)
        if resolved is not None:
            return ClassRef(node.ident)
        raise JavaFault(f"unknown name {node.ident}")

    def _resolve_class_name(self, name: str):
        plain = normalize_type(name)
        if plain in self.classes:
            return self.classes[plain]
        if plain in self.exc_classes:
            return self.exc_classes[plain]
        if plain in _BUILTIN_CLASS_NAMES:
            return plain
        if plain in self.interface_extends:
            return plain
        if "." in plain:
            # Outer.Inner qualification of a (flattened) nested class
            head, _, rest = plain.partition(".")
            if head in self.classes and rest in self.classes:
                return self.classes[rest]
        return None

    # binary operators

    def _eval_binary(self, node: Binary, frame: Frame):
        op = node.op
        if op == "&&":
            left = self.eval(node.left, frame)
            if not self._truth(left):
                return False
            return self._truth(self.eval(node.right, frame))
        if op == "||":
            left = self.eval(node.left, frame)
            if self._truth(left):
                return True
            return self._truth(self.eval(node.right, frame))
        left = self.eval(node.left, frame)
        right = self.eval(node.right, frame)
        return self._binop(op, left, right)

    def _binop(self, op: str, left, right):
        if op == "+":
            if isinstance(left, str) or isinstance(right, str):
                return self.java_str(left) + self.java_str(right)
            return self._arith(op, left, right)
        if op in ("-", "*", "/", "%"):
            return self._arith(op, left, right)
        if op == "==":
            return self._java_eq(left, right)
        if op == "!=":
            return not self._java_eq(left, right)
        if op in ("<", "<=", ">", ">="):
            if not (_is_number(left) and _is_number(right)):
                raise JavaFault(f"operator {op} needs numeric operands")
            a, b = _num(left), _num(right)
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            return a >= b
        if op in ("&", "|", "^"):
            if isinstance(left, bool) and isinstance(right, bool):
                if op == "&":
                    return left and right
                if op == "|":
                    return left or right
                return left != right
            a, b = self._int_operand(left), self._int_operand(right)
            if op == "&":
                return a & b
            if op == "|":
                return a | b
            return a ^ b
        if op in ("<<", ">>", ">>>"):
            a = self._int_operand(left)
            n = self._int_operand(right) & 31
            if op == "<<":
                return wrap32(a << n)
            if op == ">>":
                return a >> n
            return wrap32((a & 0xFFFFFFFF) >> n)
        raise JavaFault(f"unsupported operator {op}")

    def _int_operand(self, v) -> int:
        if isinstance(v, JChar):
            return ord(v.ch)
        if isinstance(v, int) and not isinstance(v, bool):
            return v
        raise JavaFault("integer operand required")

    def _arith(self, op: str, left, right):
        if not (_is_number(left) and _is_number(right)):
            raise JavaFault(f"operator {op} needs numeric operands")
        a, b = _num(left), _num(right)
        if isinstance(a, float) or isinstance(b, float):
            a, b = float(a), float(b)
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0.0:
                    if a == 0.0 or math.isnan(a):
                        return math.nan
                    return math.copysign(math.inf, a) * math.copysign(1.0, b)
                return a / b
            try:
                return math.fmod(a, b)
            except ValueError:
                return math.nan
        # integer expressions compute at 64-bit width; assignment to a
        # declared int/short/byte narrows on store, which is where Java's
        # 32-bit overflow becomes observable in practice
        if op == "+":
            return wrap64(a + b)
        if op == "-":
            return wrap64(a - b)
        if op == "*":
            return wrap64(a * b)
        if b == 0:
            self.throw("ArithmeticException", "/ by zero")
        if op == "/":
            return wrap64(_trunc_div(a, b))
        return wrap64(_trunc_mod(a, b))

    def _java_eq(self, left, right) -> bool:
        if left is None or right is None:
            return left is right
        if isinstance(left, bool) or isinstance(right, bool):
            return isinstance(left, bool) and isinstance(right, bool) and left == right
        if _is_number(left) and _is_number(right):
            return _num(left) == _num(right)
        if isinstance(left, str) and isinstance(right, str):
            return left == right
        return left is right

    def _java_equals(self, left, right) -> bool:
        """equals() semantics, used by contains/indexOf/remove(Object)."""
        if isinstance(left, JObject):
            found = self._find_method(left.rclass, "equals", [right])
            if found is not None:
                rc, method = found
                return bool(self.invoke(rc, method, left, [right]))
            return left is right
        return self._java_eq(left, right)

    # unary, assignment, lvalues

    def _eval_unary(self, node: Unary, frame: Frame):
        op = node.op
        if op in ("++", "--"):
            reader, writer = self._lvalue(node.operand, frame)
            old = reader()
            if isinstance(old, JChar):
                new = JChar(chr((ord(old.ch) + (1 if op == "++" else -1)) & 0xFFFF))
            elif isinstance(old, float):
                new = old + (1.0 if op == "++" else -1.0)
            elif isinstance(old, int) and not isinstance(old, bool):
                new = wrap64(old + (1 if op == "++" else -1))
            else:
                raise JavaFault(f"{op} needs a numeric variable")
            written = writer(new)
            return written if node.prefix else old
        value = self.eval(node.operand, frame)
        if op == "!":
            return not self._truth(value)
        if op == "~":
            return wrap64(~self._int_operand(value))
        if op == "-":
            if not _is_number(value):
                raise JavaFault("unary - needs a numeric operand")
            v = _num(value)
            return -v if isinstance(v, float) else wrap64(-v)
        if op == "+":
            if not _is_number(value):
                raise JavaFault("unary + needs a numeric operand")
            return _num(value)
        raise JavaFault(f"unsupported unary {op}")

    def _eval_assign(self, node: Assign, frame: Frame):
        reader, writer = self._lvalue(node.target, frame)
        if node.op == "=":
            return writer(self.eval(node.value, frame))
        base_op = node.op[:-1]
        current = reader()
        rhs = self.eval(node.value, frame)
        return writer(self._binop(base_op, current, rhs))

    def _lvalue(self, node, frame: Frame):
        kind = type(node)
        if kind is Name:
            cell = frame.find(node.ident)
            if cell is not None:
                def read_local():
                    return cell.value

                def write_local(v):
                    cell.value = self._coerce(cell.type_name, v)
                    return cell.value

                return read_local, write_local
            if frame.this_obj is not None and node.ident in frame.this_obj.fields:
                return self._field_lvalue(frame.this_obj, node.ident)
            if frame.owner is not None:
                for cls in frame.owner.chain():
                    if node.ident in cls.static_types:
                        return self._static_lvalue(cls, node.ident)
            raise JavaFault(f"cannot assign to unknown name {node.ident}")
        if kind is Index:
            arr = self.eval(node.arr, frame)
            idx = self.eval(node.idx, frame)
            return self._index_lvalue(arr, idx)
        if kind is FieldGet:
            target = self._eval_target(node.target, frame)
            if isinstance(target, ClassRef):
                resolved = self._resolve_class_name(target.name)
                if isinstance(resolved, RClass):
                    for cls in resolved.chain():
                        if node.name in cls.static_types:
                            return self._static_lvalue(cls, node.name)
                raise JavaFault(f"no static field {node.name} on {target.name}")
            if target is None:
                self.throw("NullPointerException", None)
            if isinstance(target, JObject):
                return self._field_lvalue(target, node.name)
            raise JavaFault(f"cannot assign to field {node.name}")
        raise JavaFault("expression is not assignable")

    def _field_lvalue(self, obj: JObject, name: str):
        if name not in obj.fields:
            raise JavaFault(f"no field {name} on {obj.rclass.name}")
        ftype = obj.rclass.field_types.get(name, "Object")

        def read():
            return obj.fields[name]

        def write(v):
            obj.fields[name] = self._coerce(ftype, v)
            return obj.fields[name]

        return read, write

    def _static_lvalue(self, cls: RClass, name: str):
        self.ensure_init(cls)
        ftype = cls.static_types[name]

        def read():
            return cls.statics[name]

        def write(v):
            cls.statics[name] = self._coerce(ftype, v)
            return cls.statics[name]

        return read, write

    def _index_lvalue(self, arr, idx):
        if arr is None:
            self.throw("NullPointerException", None)
        if not isinstance(arr, JArray):
            raise JavaFault("indexing a non-array value")
        i = self._int_operand(idx)

        def read():
            return self._array_get(arr, i)

        def write(v):
            if i < 0 or i >= len(arr.data):
                self.throw(
                    "ArrayIndexOutOfBoundsException",
                    f"Index {i} out of bounds for length {len(arr.data)}",
                )
            arr.data[i] = self._coerce(arr.elem_type, v)
            return arr.data[i]

        return read, write

    def _array_get(self, arr, idx):
        if arr is None:
            self.throw("NullPointerException", None)
        if not isinstance(arr, JArray):
            raise JavaFault("indexing a non-array value")
        i = self._int_operand(idx)
        if i < 0 or i >= len(arr.data):
            self.throw(
                "ArrayIndexOutOfBoundsException",
                f"Index {i} out of bounds for length {len(arr.data)}",
            )
        return arr.data[i]

    # field access

    def _eval_target(self, node, frame: Frame):
        """Evaluate a call/field target; bare class names become ClassRefs."""
        if isinstance(node, Name):
            cell = frame.find(node.ident)
            if cell is not None:
                return cell.value
            if frame.this_obj is not None and node.ident in frame.this_obj.fields:
                return frame.this_obj.fields[node.ident]
            if frame.owner is not None:
                for cls in frame.owner.chain():
                    if node.ident in cls.static_types:
                        self.ensure_init(cls)
                        return cls.statics[node.ident]
            if self._resolve_class_name(node.ident) is not None:
                return ClassRef(node.ident)
            raise JavaFault(f"unknown name {node.ident}")
        if isinstance(node, FieldGet):
            # fold dotted qualification like java.util.Arrays into a ClassRef
            dotted = self._dotted_name(node)
            if dotted is not None and self._resolve_class_name(dotted) is not None:
                return ClassRef(normalize_type(dotted))
        return self.eval(node, frame)

    def _dotted_name(self, node) -> str | None:
        parts = []
        cur = node
        while isinstance(cur, FieldGet):
            parts.append(cur.name)
            cur = cur.target
        if isinstance(cur, Name):
            parts.append(cur.ident)
            return ".".join(reversed(parts))
        return None

    def _eval_fieldget(self, node: FieldGet, frame: Frame):
        dotted = self._dotted_name(node)
        if dotted is not None:
            resolved = self._resolve_class_name(dotted)
            if resolved is not None and not isinstance(resolved, RClass):
                return ClassRef(normalize_type(dotted))
        target = self._eval_target(node.target, frame)
        if isinstance(target, ClassRef):
            return self._static_field(target.name, node.name)
        if target is None:
            self.throw("NullPointerException", None)
        if isinstance(target, JArray):
            if node.name == "length":
                return len(target.data)
            raise JavaFault(f"arrays have no field {node.name}")
        if isinstance(target, JObject):
            if node.name in target.fields:
                return target.fields[node.name]
            raise JavaFault(f"no field {node.name} on {target.rclass.name}")
        if isinstance(target, JMapEntry):
            raise JavaFault("Map.Entry fields are accessed via getKey()/getValue()")
        raise JavaFault(f"no field {node.name} on {type(target).__name__}")

    def _static_field(self, class_name: str, field_name: str):
        plain = normalize_type(class_name)
        resolved = self._resolve_class_name(plain)
        if isinstance(resolved, RClass) and resolved.decl is not None:
            for cls in resolved.chain():
                if field_name in cls.static_types:
                    self.ensure_init(cls)
                    return cls.statics[field_name]
            raise JavaFault(f"no static field {field_name} on {plain}")
        value = _BUILTIN_STATIC_FIELDS.get((plain, field_name), _MISSING)
        if value is not _MISSING:
            if plain == "System":
                return self.out if field_name == "out" else self.err
            return value
        raise JavaFault(f"no static field {field_name} on {plain}")

    # calls

    def _eval_call(self, node: Call, frame: Frame):
        if node.target is None:
            return self._call_unqualified(node, frame)
        if node.target == "super":
            if frame.this_obj is None or frame.owner is None or frame.owner.parent is None:
                raise JavaFault("super call outside an instance method")
            args = [self.eval(a, frame) for a in node.args]
            found = self._find_method(frame.owner.parent, node.name, args)
            if found is None:
                return self._object_fallback(frame.this_obj, node.name, args)
            rc, method = found
            return self.invoke(rc, method, frame.this_obj, args)
        target = self._eval_target(node.target, frame)
        args = [self.eval(a, frame) for a in node.args]
        if isinstance(target, ClassRef):
            return self._call_static(target.name, node.name, args, node.line)
        return self._call_value(target, node.name, args, node.line)

    def _call_unqualified(self, node: Call, frame: Frame):
        args = [self.eval(a, frame) for a in node.args]
        if frame.owner is not None:
            fallback = None
            for cls in frame.owner.chain():
                if cls.decl is None:
                    continue
                matches = [
                    m
                    for m in cls.decl.methods
                    if m.name == node.name and len(m.params) == len(args)
                ]
                if not matches:
                    continue
                method = self._pick_overload(matches, args)
                if method is None:
                    if fallback is None:
                        fallback = (cls, matches[0])
                    continue
                return self._dispatch_unqualified(cls, method, node, frame, args)
            if fallback is not None:
                return self._dispatch_unqualified(
                    fallback[0], fallback[1], node, frame, args
                )
        raise JavaFault(f"unknown method {node.name}")

    def _dispatch_unqualified(self, cls, method, node, frame, args):
        if method.is_static:
            self.ensure_init(cls)
            return self.invoke(cls, method, None, args)
        if frame.this_obj is None:
            raise JavaFault(
                f"instance method {node.name} called from a static context"
            )
        return self.invoke_virtual(frame.this_obj, node.name, args)

    def _call_static(self, class_name: str, method: str, args: list, line: int):
        plain = normalize_type(class_name)
        resolved = self._resolve_class_name(plain)
        if isinstance(resolved, RClass) and resolved.decl is not None:
            fallback = None
            for cls in resolved.chain():
                if cls.decl is None:
                    continue
                matches = [
                    m
                    for m in cls.decl.methods
                    if m.name == method and len(m.params) == len(args)
                ]
                if not matches:
                    continue
                picked = self._pick_overload(matches, args)
                if picked is None:
                    if fallback is None:
                        fallback = (cls, matches[0])
                    continue
                return self._invoke_static_picked(cls, picked, plain, method, args)
            if fallback is not None:
                return self._invoke_static_picked(
                    fallback[0], fallback[1], plain, method, args
                )
            raise JavaFault(f"no static method {method} on {plain}")
        return self._builtin_static(plain, method, args, line)

    def _invoke_static_picked(self, cls, picked, plain, method, args):
        if not picked.is_static:
            raise JavaFault(
                f"{plain}.{method} is an instance method; no receiver given"
            )
        self.ensure_init(cls)
        return self.invoke(cls, picked, None, args)

    def _call_value(self, target, name: str, args: list, line: int):
        if target is None:
            self.throw("NullPointerException", None)
        if isinstance(target, JObject):
            return self.invoke_virtual(target, name, args)
        if isinstance(target, str):
            return self._string_method(target, name, args)
        if isinstance(target, JList):
            return self._list_method(target, name, args)
        if isinstance(target, JMap):
            return self._map_method(target, name, args)
        if isinstance(target, JMapEntry):
            if name == "getKey" and not args:
                return target.key
            if name == "getValue" and not args:
                return target.value
            raise JavaFault(f"no method {name} on Map.Entry")
        if isinstance(target, JStringBuilder):
            return self._sb_method(target, name, args)
        if isinstance(target, JPrintStream):
            return self._stream_method(target, name, args)
        if isinstance(target, JFileWriter):
            return self._writer_method(target, name, args)
        if isinstance(target, JArray):
            if name == "getClass" and not args:
                return JClass(target.elem_type + "[]")
            raise JavaFault(f"no method {name} on arrays")
        if isinstance(target, JClass):
            if name in ("getSimpleName", "getName") and not args:
                return target.name
            if name == "toString" and not args:
                return f"class {target.name}"
            if name == "equals" and len(args) == 1:
                return isinstance(args[0], JClass) and args[0].name == target.name
            raise JavaFault(f"no method {name} on Class")
        if isinstance(target, JChar):
            if name == "charValue" and not args:
                return target
            if name == "compareTo" and len(args) == 1 and isinstance(args[0], JChar):
                return ord(target.ch) - ord(args[0].ch)
            if name == "equals" and len(args) == 1:
                return isinstance(args[0], JChar) and args[0].ch == target.ch
            if name == "toString" and not args:
                return target.ch
        if isinstance(target, bool):
            if name == "toString" and not args:
                return self.java_str(target)
            if name == "equals" and len(args) == 1:
                return self._java_eq(target, args[0])
        if isinstance(target, (int, float)):
            if name == "toString" and not args:
                return self.java_str(target)
            if name == "equals" and len(args) == 1:
                return self._java_eq(target, args[0])
            if name == "intValue" and not args:
                return int(target)
            if name == "doubleValue" and not args:
                return float(target)
            if name == "compareTo" and len(args) == 1 and _is_number(args[0]):
                other = _num(args[0])
                mine = _num(target)
                return (mine > other) - (mine < other)
            if name == "hashCode" and not args and isinstance(target, int):
                return wrap32(target)
        raise JavaFault(f"no method {name} on {type(target).__name__}")

    # object construction expression

    def _eval_new(self, node: New, frame: Frame):
        plain = normalize_type(node.type_name)
        args = [self.eval(a, frame) for a in node.args]
        resolved = self._resolve_class_name(plain)
        if isinstance(resolved, RClass):
            if resolved.decl is not None:
                return self.construct(resolved, args, node.line)
            obj = JObject(resolved, self.next_seq())
            obj.fields["message"] = args[0] if args else None
            return obj
        if plain == "ArrayList":
            if args and isinstance(args[0], JList):
                return JList(args[0].data)
            return JList()
        if plain == "HashMap":
            m = JMap()
            if args and isinstance(args[0], JMap):
                m.data.update(args[0].data)
            return m
        if plain == "StringBuilder":
            if args and isinstance(args[0], str):
                return JStringBuilder(args[0])
            return JStringBuilder()
        if plain == "String":
            if not args:
                return ""
            if isinstance(args[0], str):
                return args[0]
            if isinstance(args[0], JArray) and args[0].elem_type == "char":
                return "".join(c.ch for c in args[0].data)
            raise JavaFault("unsupported String constructor")
        if plain == "FileWriter":
            return self._new_filewriter(args)
        if plain == "Object":
            rc = RClass(None, "Object")
            return JObject(rc, self.next_seq())
        if plain == "Random":
            raise UnsupportedOp("java.util.Random is nondeterministic")
        if plain == "Scanner":
            raise UnsupportedOp("Scanner reads external input")
        raise JavaFault(f"unknown class {node.type_name}")

    def _new_filewriter(self, args: list) -> JFileWriter:
        if not args or not isinstance(args[0], str):
            raise JavaFault("FileWriter needs a path")
        append = len(args) > 1 and args[1] is True
        try:
            handle = open(args[0], "a" if append else "w", encoding="utf-8")
        except OSError as exc:
            reason = exc.strerror or "cannot open"
            self.throw("IOException", f"{args[0]} ({reason})")
        return JFileWriter(handle, args[0])

    def _eval_new_array(self, node: NewArray, frame: Frame):
        if node.init is not None:
            return self._build_array_lit(node.elem_type + "[]", node.init, frame)
        dims = [self._int_operand(self.eval(d, frame)) for d in node.dims]
        for d in dims:
            if d < 0:
                self.throw("NegativeArraySizeException", str(d))
        return self._alloc_array(node.elem_type, dims)

    def _alloc_array(self, elem_type: str, dims: list) -> JArray:
        if len(dims) == 1:
            default = self._default_value(elem_type)
            return JArray(elem_type, [default for _ in range(dims[0])])
        outer_elem = elem_type + "[]" * (len(dims) - 1)
        data = [self._alloc_array(elem_type, dims[1:]) for _ in range(dims[0])]
        return JArray(outer_elem, data)

    # casts + instanceof

    def _eval_cast(self, node: Cast, frame: Frame):
        value = self.eval(node.expr, frame)
        t = normalize_type(node.type_name)
        if t in INTEGRAL_TYPES:
            if isinstance(value, bool):
                raise JavaFault("cannot cast boolean to a number")
            if isinstance(value, JChar):
                value = ord(value.ch)
            if isinstance(value, float):
                value = self._double_to_int(value, t)
            if not isinstance(value, int):
                raise JavaFault(f"cannot cast to {t}")
            if t == "int":
                return wrap32(value)
            if t == "long":
                return wrap64(value)
            if t == "short":
                return ((value + 2**15) % 2**16) - 2**15
            return ((value + 2**7) % 2**8) - 2**7
        if t in FLOAT_TYPES:
            if isinstance(value, bool) or not _is_number(value):
                raise JavaFault(f"cannot cast to {t}")
            return float(_num(value))
        if t == "char":
            if isinstance(value, JChar):
                return value
            if isinstance(value, int) and not isinstance(value, bool):
                return JChar(chr(value & 0xFFFF))
            raise JavaFault("cannot cast to char")
        if t == "boolean":
            if isinstance(value, bool):
                return value
            raise JavaFault("cannot cast to boolean")
        if value is None:
            return None
        if self._instance_of(value, t):
            return value
        desc = value.rclass.name if isinstance(value, JObject) else type(value).__name__
        self.throw("ClassCastException", f"{desc} cannot be cast to {t}")

    def _instance_of(self, value, type_name: str) -> bool:
        t = normalize_type(type_name)
        if value is None:
            return False
        if t == "Object":
            return True
        if isinstance(value, JObject):
            return value.rclass.is_subclass_of(t) or t in value.rclass.interfaces
        if isinstance(value, str):
            return t in ("String", "CharSequence", "Comparable")
        if isinstance(value, JList):
            return t in ("ArrayList", "List", "Collection", "Iterable")
        if isinstance(value, JMap):
            return t in ("HashMap", "Map")
        if isinstance(value, JStringBuilder):
            return t in ("StringBuilder", "CharSequence")
        if isinstance(value, JArray):
            return t == value.elem_type + "[]"
        if isinstance(value, bool):
            return t == "Boolean"
        if isinstance(value, int):
            return t in ("Integer", "Number")
        if isinstance(value, float):
            return t in ("Double", "Number")
        if isinstance(value, JChar):
            return t == "Character"
        return False

    # builtin statics

    def _builtin_static(self, class_name: str, method: str, args: list, line: int):
        if class_name == "System":
            return self._system_static(method, args)
        if class_name == "Math":
            return self._math_static(method, args)
        if class_name == "Integer":
            return self._integer_static(method, args)
        if class_name == "Long":
            return self._integer_static(method, args)
        if class_name == "Double":
            return self._double_static(method, args)
        if class_name == "Boolean":
            return self._boolean_static(method, args)
        if class_name == "Character":
            return self._character_static(method, args)
        if class_name == "String":
            return self._string_static(method, args)
        if class_name == "Arrays":
            return self._arrays_static(method, args)
        if class_name == "Collections":
            return self._collections_static(method, args)
        if class_name == "Objects":
            if method == "equals" and len(args) == 2:
                return self._java_equals(args[0], args[1])
            if method == "isNull" and len(args) == 1:
                return args[0] is None
            if method == "nonNull" and len(args) == 1:
                return args[0] is not None
        raise JavaFault(f"no builtin {class_name}.{method}")

    def _system_static(self, method: str, args: list):
        if method == "getenv":
            if len(args) == 1 and isinstance(args[0], str):
                return os.environ.get(args[0])
            raise JavaFault("System.getenv needs a name")
        if method == "exit":
            raise UnsupportedOp("System.exit terminates the harness")
        if method in ("currentTimeMillis", "nanoTime"):
            raise UnsupportedOp(f"System.{method} is nondeterministic")
        if method == "lineSeparator" and not args:
            return "\n"
        if method == "arraycopy" and len(args) == 5:
            src, sp, dst, dp, n = args
            if not isinstance(src, JArray) or not isinstance(dst, JArray):
                raise JavaFault("System.arraycopy needs arrays")
            sp, dp, n = (self._int_operand(x) for x in (sp, dp, n))
            if n < 0 or sp < 0 or dp < 0 or sp + n > len(src.data) or dp + n > len(dst.data):
                self.throw("ArrayIndexOutOfBoundsException", "arraycopy out of range")
            chunk = src.data[sp : sp + n]
            dst.data[dp : dp + n] = chunk
            return None
        if method == "identityHashCode" and len(args) == 1:
            v = args[0]
            return wrap32(v.seq) if isinstance(v, JObject) else 0
        raise JavaFault(f"no builtin System.{method}")

    def _math_static(self, method: str, args: list):
        if method == "random":
            raise UnsupportedOp("Math.random is nondeterministic")
        nums = [_num(a) for a in args if _is_number(a)]
        if len(nums) != len(args):
            raise JavaFault(f"Math.{method} needs numeric arguments")
        all_int = all(isinstance(n, int) for n in nums)
        if method == "abs" and len(nums) == 1:
            return wrap64(abs(nums[0])) if all_int else abs(nums[0])
        if method == "max" and len(nums) == 2:
            return max(nums)
        if method == "min" and len(nums) == 2:
            return min(nums)
        if method == "sqrt" and len(nums) == 1:
            v = float(nums[0])
            return math.sqrt(v) if v >= 0 else math.nan
        if method == "pow" and len(nums) == 2:
            return float(pow(float(nums[0]), float(nums[1])))
        if method == "floor" and len(nums) == 1:
            return float(math.floor(nums[0]))
        if method == "ceil" and len(nums) == 1:
            return float(math.ceil(nums[0]))
        if method == "round" and len(nums) == 1:
            return wrap64(math.floor(nums[0] + 0.5))
        if method == "floorDiv" and len(nums) == 2:
            if nums[1] == 0:
                self.throw("ArithmeticException", "/ by zero")
            return wrap64(nums[0] // nums[1])
        if method == "floorMod" and len(nums) == 2:
            if nums[1] == 0:
                self.throw("ArithmeticException", "/ by zero")
            return wrap64(nums[0] % nums[1])
        if method == "log" and len(nums) == 1:
            v = float(nums[0])
            if v < 0:
                return math.nan
            return -math.inf if v == 0 else math.log(v)
        if method == "log10" and len(nums) == 1:
            v = float(nums[0])
            if v < 0:
                return math.nan
            return -math.inf if v == 0 else math.log10(v)
        if method == "exp" and len(nums) == 1:
            return math.exp(float(nums[0]))
        if method in ("sin", "cos", "tan") and len(nums) == 1:
            return getattr(math, method)(float(nums[0]))
        if method == "hypot" and len(nums) == 2:
            return math.hypot(float(nums[0]), float(nums[1]))
        if method == "toIntExact" and len(nums) == 1:
            v = int(nums[0])
            if v < INT_MIN or v > INT_MAX:
                self.throw("ArithmeticException", "integer overflow")
            return v
        raise JavaFault(f"no builtin Math.{method}")

    def _integer_static(self, method: str, args: list):
        if method == "parseInt" and args and isinstance(args[0], str):
            text = args[0]
            radix = self._int_operand(args[1]) if len(args) > 1 else 10
            # java rejects surrounding whitespace that python int() tolerates
            if not text or text != text.strip():
                self.throw("NumberFormatException", f'For input string: "{text}"')
            try:
                value = int(text, radix)
            except ValueError:
                self.throw("NumberFormatException", f'For input string: "{text}"')
            if not (INT_MIN <= value <= INT_MAX):
                self.throw("NumberFormatException", f'For input string: "{text}"')
            return value
        if method == "valueOf" and len(args) == 1:
            if isinstance(args[0], str):
                return self._integer_static("parseInt", args)
            return self._int_operand(args[0])
        if method == "toString" and len(args) == 1:
            return str(self._int_operand(args[0]))
        if method == "toBinaryString" and len(args) == 1:
            return format(self._int_operand(args[0]) & 0xFFFFFFFF, "b")
        if method == "toHexString" and len(args) == 1:
            return format(self._int_operand(args[0]) & 0xFFFFFFFF, "x")
        if method == "compare" and len(args) == 2:
            a, b = self._int_operand(args[0]), self._int_operand(args[1])
            return (a > b) - (a < b)
        if method == "max" and len(args) == 2:
            return max(self._int_operand(args[0]), self._int_operand(args[1]))
        if method == "min" and len(args) == 2:
            return min(self._int_operand(args[0]), self._int_operand(args[1]))
        raise JavaFault(f"no builtin Integer.{method}")

    def _double_static(self, method: str, args: list):
        if method == "parseDouble" and len(args) == 1 and isinstance(args[0], str):
            try:
                return float(args[0])
            except ValueError:
                self.throw("NumberFormatException", f'For input string: "{args[0]}"')
        if method == "valueOf" and len(args) == 1:
            if isinstance(args[0], str):
                return self._double_static("parseDouble", args)
            return float(_num(args[0]))
        if method == "toString" and len(args) == 1:
            return _double_str(float(_num(args[0])))
        if method == "isNaN" and len(args) == 1:
            return isinstance(args[0], float) and math.isnan(args[0])
        if method == "compare" and len(args) == 2:
            a, b = float(_num(args[0])), float(_num(args[1]))
            return (a > b) - (a < b)
        raise JavaFault(f"no builtin Double.{method}")

    def _boolean_static(self, method: str, args: list):
        if method == "parseBoolean" and len(args) == 1 and isinstance(args[0], str):
            return args[0].lower() == "true"
        if method == "valueOf" and len(args) == 1:
            if isinstance(args[0], str):
                return args[0].lower() == "true"
            if isinstance(args[0], bool):
                return args[0]
        if method == "toString" and len(args) == 1 and isinstance(args[0], bool):
            return self.java_str(args[0])
        raise JavaFault(f"no builtin Boolean.{method}")

    def _character_static(self, method: str, args: list):
        if len(args) >= 1 and isinstance(args[0], JChar):
            c = args[0].ch
            if method == "isDigit":
                return c.isdigit() and c.isascii()
            if method == "isLetter":
                return c.isalpha()
            if method == "isLetterOrDigit":
                return c.isalpha() or (c.isdigit() and c.isascii())
            if method == "isWhitespace":
                return c.isspace()
            if method == "isUpperCase":
                return c.isupper()
            if method == "isLowerCase":
                return c.islower()
            if method == "toUpperCase":
                return JChar(c.upper() if len(c.upper()) == 1 else c)
            if method == "toLowerCase":
                return JChar(c.lower() if len(c.lower()) == 1 else c)
            if method == "getNumericValue":
                return int(c) if c.isdigit() else -1
            if method == "toString":
                return c
        raise JavaFault(f"no builtin Character.{method}")

    def _string_static(self, method: str, args: list):
        if method == "valueOf" and len(args) == 1:
            return self.java_str(args[0])
        if method == "format" and args and isinstance(args[0], str):
            return self._format(args[0], args[1:])
        if method == "join" and len(args) >= 1 and isinstance(args[0], str):
            sep = args[0]
            if len(args) == 2 and isinstance(args[1], (JList, JArray)):
                return sep.join(self.java_str(e) for e in args[1].data)
            return sep.join(self.java_str(a) for a in args[1:])
        raise JavaFault(f"no builtin String.{method}")

    def _arrays_static(self, method: str, args: list):
        if method == "sort" and args and isinstance(args[0], JArray):
            arr = args[0]
            if len(args) == 1:
                self._sort_natural(arr.data)
            else:
                arr.data.sort(key=cmp_to_key(self._comparator_fn(args[1])))
            return None
        if method == "asList":
            if len(args) == 1 and isinstance(args[0], JArray):
                return JList(args[0].data)
            return JList(args)
        if method == "toString" and len(args) == 1:
            if args[0] is None:
                return "null"
            if isinstance(args[0], JArray):
                return "[" + ", ".join(self.java_str(e) for e in args[0].data) + "]"
        if method == "fill" and len(args) == 2 and isinstance(args[0], JArray):
            arr = args[0]
            value = self._coerce(arr.elem_type, args[1])
            for i in range(len(arr.data)):
                arr.data[i] = value
            return None
        if method == "copyOf" and len(args) == 2 and isinstance(args[0], JArray):
            arr = args[0]
            n = self._int_operand(args[1])
            if n < 0:
                self.throw("NegativeArraySizeException", str(n))
            default = self._default_value(arr.elem_type)
            data = [arr.data[i] if i < len(arr.data) else default for i in range(n)]
            return JArray(arr.elem_type, data)
        if method == "equals" and len(args) == 2:
            a, b = args
            if a is None or b is None:
                return a is b
            if isinstance(a, JArray) and isinstance(b, JArray):
                return len(a.data) == len(b.data) and all(
                    self._java_equals(x, y) for x, y in zip(a.data, b.data)
                )
        raise JavaFault(f"no builtin Arrays.{method}")

    def _collections_static(self, method: str, args: list):
        if method == "sort" and args and isinstance(args[0], JList):
            lst = args[0]
            if len(args) == 1:
                self._sort_natural(lst.data)
            else:
                lst.data.sort(key=cmp_to_key(self._comparator_fn(args[1])))
            return None
        if method == "reverse" and len(args) == 1 and isinstance(args[0], JList):
            args[0].data.reverse()
            return None
        if method in ("max", "min") and args and isinstance(args[0], JList):
            data = args[0].data
            if not data:
                raise JavaFault(f"Collections.{method} of an empty list")
            if len(args) == 2:
                key = cmp_to_key(self._comparator_fn(args[1]))
            else:
                key = cmp_to_key(self._natural_cmp)
            return max(data, key=key) if method == "max" else min(data, key=key)
        raise JavaFault(f"no builtin Collections.{method}")

    def _comparator_fn(self, comp):
        if not isinstance(comp, JObject):
            raise JavaFault("comparator must be an object with compare()")

        def compare(a, b):
            result = self.invoke_virtual(comp, "compare", [a, b])
            return self._int_operand(result)

        return compare

    def _natural_cmp(self, a, b) -> int:
        if isinstance(a, JObject):
            result = self.invoke_virtual(a, "compareTo", [b])
            return self._int_operand(result)
        if isinstance(a, str) and isinstance(b, str):
            return self._string_compare(a, b)
        if _is_number(a) and _is_number(b):
            x, y = _num(a), _num(b)
            return (x > y) - (x < y)
        raise JavaFault("values are not comparable")

    def _sort_natural(self, data: list):
        data.sort(key=cmp_to_key(self._natural_cmp))

    def _string_compare(self, a: str, b: str) -> int:
        for x, y in zip(a, b):
            if x != y:
                return ord(x) - ord(y)
        return len(a) - len(b)

    # instance methods of builtin types

    def _string_method(self, s: str, name: str, args: list):
        if name == "length" and not args:
            return len(s)
        if name == "charAt" and len(args) == 1:
            i = self._int_operand(args[0])
            if i < 0 or i >= len(s):
                self.throw(
                    "StringIndexOutOfBoundsException",
                    f"index {i}, length {len(s)}",
                )
            return JChar(s[i])
        if name == "substring" and args:
            b = self._int_operand(args[0])
            e = self._int_operand(args[1]) if len(args) > 1 else len(s)
            if b < 0 or e > len(s) or b > e:
                self.throw(
                    "StringIndexOutOfBoundsException",
                    f"begin {b}, end {e}, length {len(s)}",
                )
            return s[b:e]
        if name in ("indexOf", "lastIndexOf") and args:
            needle = args[0].ch if isinstance(args[0], JChar) else args[0]
            if isinstance(needle, int):
                needle = chr(needle)
            if not isinstance(needle, str):
                raise JavaFault(f"{name} needs a string or char")
            if name == "indexOf":
                start = self._int_operand(args[1]) if len(args) > 1 else 0
                return s.find(needle, max(0, start))
            if len(args) > 1:
                end = self._int_operand(args[1]) + len(needle)
                return s.rfind(needle, 0, max(0, end))
            return s.rfind(needle)
        if name == "contains" and len(args) == 1 and isinstance(args[0], str):
            return args[0] in s
        if name == "startsWith" and args and isinstance(args[0], str):
            off = self._int_operand(args[1]) if len(args) > 1 else 0
            return s.startswith(args[0], off)
        if name == "endsWith" and len(args) == 1 and isinstance(args[0], str):
            return s.endswith(args[0])
        if name == "equals" and len(args) == 1:
            return isinstance(args[0], str) and args[0] == s
        if name == "equalsIgnoreCase" and len(args) == 1:
            return isinstance(args[0], str) and args[0].lower() == s.lower()
        if name == "compareTo" and len(args) == 1 and isinstance(args[0], str):
            return self._string_compare(s, args[0])
        if name == "compareToIgnoreCase" and len(args) == 1 and isinstance(args[0], str):
            return self._string_compare(s.lower(), args[0].lower())
        if name == "toUpperCase" and not args:
            return s.upper()
        if name == "toLowerCase" and not args:
            return s.lower()
        if name == "trim" and not args:
            return _java_trim(s)
        if name == "split" and args and isinstance(args[0], str):
            return self._string_split(s, args[0])
        if name == "replace" and len(args) == 2:
            old = args[0].ch if isinstance(args[0], JChar) else args[0]
            new = args[1].ch if isinstance(args[1], JChar) else args[1]
            if isinstance(old, str) and isinstance(new, str):
                return s.replace(old, new)
            raise JavaFault("replace needs strings or chars")
        if name == "isEmpty" and not args:
            return len(s) == 0
        if name == "toCharArray" and not args:
            return JArray("char", [JChar(c) for c in s])
        if name == "hashCode" and not args:
            return _string_hash(s)
        if name == "concat" and len(args) == 1 and isinstance(args[0], str):
            return s + args[0]
        if name == "intern" and not args:
            return s
        if name == "toString" and not args:
            return s
        if name == "getClass" and not args:
            return JClass("String")
        raise JavaFault(f"no method {name} on String")

    def _string_split(self, s: str, pattern: str) -> JArray:
        try:
            parts = re.split(pattern, s)
        except re.error:
            raise JavaFault(f"bad split pattern {pattern!r}") from None
        while parts and parts[-1] == "":
            parts.pop()
        return JArray("String", parts)

    def _list_method(self, lst: JList, name: str, args: list):
        data = lst.data
        if name == "add":
            if len(args) == 1:
                data.append(args[0])
                return True
            if len(args) == 2:
                i = self._int_operand(args[0])
                if i < 0 or i > len(data):
                    self.throw(
                        "IndexOutOfBoundsException",
                        f"Index: {i}, Size: {len(data)}",
                    )
                data.insert(i, args[1])
                return None
        if name == "get" and len(args) == 1:
            i = self._int_operand(args[0])
            if i < 0 or i >= len(data):
                self.throw(
                    "IndexOutOfBoundsException",
                    f"Index {i} out of bounds for length {len(data)}",
                )
            return data[i]
        if name == "set" and len(args) == 2:
            i = self._int_operand(args[0])
            if i < 0 or i >= len(data):
                self.throw(
                    "IndexOutOfBoundsException",
                    f"Index {i} out of bounds for length {len(data)}",
                )
            old = data[i]
            data[i] = args[1]
            return old
        if name == "remove" and len(args) == 1:
            if isinstance(args[0], int) and not isinstance(args[0], bool):
                i = args[0]
                if i < 0 or i >= len(data):
                    self.throw(
                        "IndexOutOfBoundsException",
                        f"Index {i} out of bounds for length {len(data)}",
                    )
                return data.pop(i)
            for i, item in enumerate(data):
                if self._java_equals(item, args[0]):
                    data.pop(i)
                    return True
            return False
        if name == "size" and not args:
            return len(data)
        if name == "isEmpty" and not args:
            return not data
        if name == "contains" and len(args) == 1:
            return any(self._java_equals(item, args[0]) for item in data)
        if name == "indexOf" and len(args) == 1:
            for i, item in enumerate(data):
                if self._java_equals(item, args[0]):
                    return i
            return -1
        if name == "clear" and not args:
            data.clear()
            return None
        if name == "addAll" and len(args) == 1 and isinstance(args[0], JList):
            had = bool(args[0].data)
            data.extend(args[0].data)
            return had
        if name == "sort" and len(args) == 1:
            if args[0] is None:
                self._sort_natural(data)
            else:
                data.sort(key=cmp_to_key(self._comparator_fn(args[0])))
            return None
        if name == "toString" and not args:
            return self.java_str(lst)
        if name == "equals" and len(args) == 1:
            other = args[0]
            return (
                isinstance(other, JList)
                and len(other.data) == len(data)
                and all(self._java_equals(a, b) for a, b in zip(data, other.data))
            )
        if name == "hashCode" and not args:
            return wrap32(id(lst))
        if name == "getClass" and not args:
            return JClass("ArrayList")
        raise JavaFault(f"no method {name} on ArrayList")

    def _map_key(self, key):
        if isinstance(key, JObject):
            return ("obj", key.seq)
        if isinstance(key, bool):
            return ("bool", key)
        if isinstance(key, JChar):
            return ("char", key.ch)
        if isinstance(key, (int, float)):
            return ("num", float(key))
        if isinstance(key, str):
            return ("str", key)
        if key is None:
            return ("null",)
        raise JavaFault(f"unsupported map key type {type(key).__name__}")

    def _map_method(self, m: JMap, name: str, args: list):
        if name == "put" and len(args) == 2:
            k = self._map_key(args[0])
            old = m.data.get(k)
            m.data[k] = (args[0], args[1])
            return old[1] if old is not None else None
        if name == "get" and len(args) == 1:
            entry = m.data.get(self._map_key(args[0]))
            return entry[1] if entry is not None else None
        if name == "getOrDefault" and len(args) == 2:
            entry = m.data.get(self._map_key(args[0]))
            return entry[1] if entry is not None else args[1]
        if name == "containsKey" and len(args) == 1:
            return self._map_key(args[0]) in m.data
        if name == "containsValue" and len(args) == 1:
            return any(self._java_equals(v, args[0]) for _, v in m.data.values())
        if name == "remove" and len(args) == 1:
            entry = m.data.pop(self._map_key(args[0]), None)
            return entry[1] if entry is not None else None
        if name == "size" and not args:
            return len(m.data)
        if name == "isEmpty" and not args:
            return not m.data
        if name == "clear" and not args:
            m.data.clear()
            return None
        if name == "keySet" and not args:
            return JList([k for k, _ in m.data.values()])
        if name == "values" and not args:
            return JList([v for _, v in m.data.values()])
        if name == "entrySet" and not args:
            return JList([JMapEntry(k, v) for k, v in m.data.values()])
        if name == "putIfAbsent" and len(args) == 2:
            k = self._map_key(args[0])
            entry = m.data.get(k)
            if entry is not None:
                return entry[1]
            m.data[k] = (args[0], args[1])
            return None
        if name == "toString" and not args:
            inner = ", ".join(
                f"{self.java_str(k)}={self.java_str(v)}" for k, v in m.data.values()
            )
            return "{" + inner + "}"
        if name == "getClass" and not args:
            return JClass("HashMap")
        raise JavaFault(f"no method {name} on HashMap")

    def _sb_method(self, sb: JStringBuilder, name: str, args: list):
        if name == "append" and len(args) == 1:
            sb.parts.append(self.java_str(args[0]))
            return sb
        if name == "toString" and not args:
            return sb.value()
        if name == "length" and not args:
            return len(sb.value())
        if name == "charAt" and len(args) == 1:
            text = sb.value()
            i = self._int_operand(args[0])
            if i < 0 or i >= len(text):
                self.throw(
                    "StringIndexOutOfBoundsException", f"index {i}, length {len(text)}"
                )
            return JChar(text[i])
        if name == "reverse" and not args:
            sb.parts = [sb.value()[::-1]]
            return sb
        if name == "insert" and len(args) == 2:
            text = sb.value()
            i = self._int_operand(args[0])
            if i < 0 or i > len(text):
                self.throw(
                    "StringIndexOutOfBoundsException", f"index {i}, length {len(text)}"
                )
            sb.parts = [text[:i] + self.java_str(args[1]) + text[i:]]
            return sb
        if name == "deleteCharAt" and len(args) == 1:
            text = sb.value()
            i = self._int_operand(args[0])
            if i < 0 or i >= len(text):
                self.throw(
                    "StringIndexOutOfBoundsException", f"index {i}, length {len(text)}"
                )
            sb.parts = [text[:i] + text[i + 1 :]]
            return sb
        if name == "setLength" and len(args) == 1:
            text = sb.value()
            n = self._int_operand(args[0])
            if n < 0:
                self.throw("StringIndexOutOfBoundsException", f"index {n}")
            sb.parts = [text[:n] + "\x00" * max(0, n - len(text))]
            return None
        raise JavaFault(f"no method {name} on StringBuilder")

    def _stream_method(self, stream: JPrintStream, name: str, args: list):
        if name == "println":
            if not args:
                stream.stream.write("\n")
                return None
            if len(args) == 1:
                stream.stream.write(self.java_str(args[0]) + "\n")
                return None
        if name == "print" and len(args) == 1:
            stream.stream.write(self.java_str(args[0]))
            return None
        if name == "printf" and args and isinstance(args[0], str):
            stream.stream.write(self._format(args[0], args[1:]))
            return stream
        if name == "flush" and not args:
            stream.stream.flush()
            return None
        raise JavaFault(f"no method {name} on PrintStream")

    def _writer_method(self, writer: JFileWriter, name: str, args: list):
        if name == "write" and len(args) == 1:
            if writer.handle.closed:
                self.throw("IOException", "Stream closed")
            value = args[0]
            if isinstance(value, str):
                writer.handle.write(value)
            elif isinstance(value, JChar):
                writer.handle.write(value.ch)
            elif isinstance(value, int) and not isinstance(value, bool):
                writer.handle.write(chr(value & 0xFFFF))
            else:
                raise JavaFault("FileWriter.write needs a string or char")
            return None
        if name == "close" and not args:
            if not writer.handle.closed:
                writer.handle.close()
            return None
        if name == "flush" and not args:
            if writer.handle.closed:
                self.throw("IOException", "Stream closed")
            writer.handle.flush()
            return None
        raise JavaFault(f"no method {name} on FileWriter")

    # printf-style formatting

    _FORMAT_SPEC = re.compile(r"%([-+0# ]*)(\d*)(?:\.(\d+))?([a-zA-Z%])")

    def _format(self, fmt: str, args: list) -> str:
        out = []
        idx = 0
        pos = 0
        while pos < len(fmt):
            ch = fmt[pos]
            if ch != "%":
                out.append(ch)
                pos += 1
                continue
            m = self._FORMAT_SPEC.match(fmt, pos)
            if m is None:
                raise JavaFault(f"bad format string {fmt!r}")
            flags, width, precision, conv = m.groups()
            pos = m.end()
            if conv == "%":
                out.append("%")
                continue
            if conv == "n":
                out.append("\n")
                continue
            if idx >= len(args):
                raise JavaFault("format string has more specifiers than arguments")
            arg = args[idx]
            idx += 1
            out.append(self._format_one(flags, width, precision, conv, arg))
        return "".join(out)

    def _format_one(self, flags, width, precision, conv, arg) -> str:
        sign = "+" if "+" in flags else ""
        if conv == "d":
            text = format(self._int_operand(arg), sign + "d")
        elif conv in ("x", "X"):
            text = format(self._int_operand(arg) & 0xFFFFFFFF, conv)
        elif conv == "o":
            text = format(self._int_operand(arg) & 0xFFFFFFFF, "o")
        elif conv in ("f", "e", "E"):
            if not _is_number(arg):
                raise JavaFault(f"%{conv} needs a number")
            prec = precision if precision is not None else "6"
            text = format(float(_num(arg)), sign + "." + prec + conv)
        elif conv == "s":
            text = self.java_str(arg)
            if precision is not None:
                text = text[: int(precision)]
        elif conv == "b":
            text = "true" if arg is True else ("false" if arg in (False, None) else "true")
        elif conv == "c":
            if isinstance(arg, JChar):
                text = arg.ch
            elif isinstance(arg, int) and not isinstance(arg, bool):
                text = chr(arg & 0xFFFF)
            else:
                raise JavaFault("%c needs a char")
        else:
            raise JavaFault(f"unsupported format conversion %{conv}")
        w = int(width) if width else 0
        if w > len(text):
            if "-" in flags:
                text = text.ljust(w)
            elif "0" in flags and conv in ("d", "x", "X", "o", "f", "e", "E"):
                if text and text[0] in "+-":
                    text = text[0] + text[1:].rjust(w - 1, "0")
                else:
                    text = text.rjust(w, "0")
            else:
                text = text.rjust(w)
        return text

    # program entry

    def run_main(self):
        main_cls = None
        for decl in self.unit.classes:
            for m in decl.methods:
                if (
                    m.name == "main"
                    and m.is_static
                    and m.return_type == "void"
                    and len(m.params) == 1
                    and m.params[0].type_name == "String[]"
                ):
                    main_cls = self.classes[decl.name]
                    break
            if main_cls is not None:
                break
        if main_cls is None:
            raise JavaFault("no public static void main(String[]) method")
        self.ensure_init(main_cls)
        args = JArray("String", [])
        self._call_static(main_cls.name, "main", [args], 0)


def _array_type_code(elem_type: str) -> str:
    codes = {
        "int": "[I",
        "long": "[J",
        "double": "[D",
        "float": "[F",
        "boolean": "[Z",
        "char": "[C",
        "short": "[S",
        "byte": "[B",
        "String": "[Ljava.lang.String;",
    }
    return codes.get(elem_type, f"[L{elem_type};")


_BUILTIN_CLASS_NAMES = {
    "System",
    "Math",
    "Integer",
    "Long",
    "Double",
    "Boolean",
    "Character",
    "String",
    "Arrays",
    "Collections",
    "Objects",
    "ArrayList",
    "HashMap",
    "StringBuilder",
    "FileWriter",
    "Object",
    "Comparator",
    "List",
    "Map",
}

_BUILTIN_STATIC_FIELDS = {
    ("System", "out"): None,  # filled per-interpreter
    ("System", "err"): None,
    ("Integer", "MAX_VALUE"): INT_MAX,
    ("Integer", "MIN_VALUE"): INT_MIN,
    ("Long", "MAX_VALUE"): 2**63 - 1,
    ("Long", "MIN_VALUE"): -(2**63),
    ("Double", "MAX_VALUE"): sys.float_info.max,
    ("Double", "MIN_VALUE"): 5e-324,
    ("Double", "NaN"): math.nan,
    ("Double", "POSITIVE_INFINITY"): math.inf,
    ("Double", "NEGATIVE_INFINITY"): -math.inf,
    ("Math", "PI"): math.pi,
    ("Math", "E"): math.e,
}


def run_file(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        sys.stderr.write(f"error: cannot read {path}: {exc}\n")
        return 2
    try:
        unit = parse_java_unit(source, trusted=True)
    except UnsupportedConstructError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    try:
        interp = Interpreter(unit)
    except JavaFault as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    sys.setrecursionlimit(100_000)
    try:
        interp.run_main()
    except JavaThrow as thrown:
        sys.stdout.flush()
        sys.stderr.write(
            f'Exception in thread "main" {interp.throwable_str(thrown.obj)}\n'
        )
        return 1
    except UnsupportedOp as exc:
        sys.stdout.flush()
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except JavaFault as exc:
        sys.stdout.flush()
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except RecursionError:
        sys.stdout.flush()
        sys.stderr.write('Exception in thread "main" java.lang.StackOverflowError\n')
        return 1
    sys.stdout.flush()
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="callwitness-java-runtime",
        description="Run a program written in the traceable Java subset.",
    )
    parser.add_argument("java_file", help="path to the .java source file")
    ns = parser.parse_args(argv)
    return run_file(ns.java_file)


if __name__ == "__main__":
    sys.exit(main())
