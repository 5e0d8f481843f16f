"""Recursive-descent parser for the Java subset.

Produces a full AST: the instrumenter needs body offsets for probe insertion
and the bundled runtime interprets the same tree, so parsing here doubles as
the compile check. Anything outside the subset fails loudly with a line
number.

In the subset: top-level classes and interfaces, static nested classes,
fields, methods, constructors (with this/super chaining), the standard
statement and expression grammar, arrays, erasure-trivial generics in type
positions, java.util collection imports, a package declaration.

Rejected: lambdas, method references, anonymous and inner classes, enums,
records, threads, reflection, varargs, labeled statements, synchronized and
friends, generic type/method declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (
    MissingEntryPointError,
    UnsupportedConstructError,
)
from ..schema import Language, QualifiedName
from .lexer import Token, tokenize

PRIMITIVES = {"int", "long", "short", "byte", "double", "float", "boolean", "char", "void"}

MODIFIERS = {"public", "private", "protected", "static", "final", "abstract"}

REJECTED_MODIFIERS = {"synchronized", "volatile", "transient", "native", "strictfp"}

ALLOWED_IMPORTS = {
    "java.util.*", "java.util.ArrayList", "java.util.HashMap", "java.util.List",
    "java.util.Map", "java.util.Arrays", "java.util.Collections", "java.util.Comparator",
}

FORBIDDEN_IDENTIFIERS = {
    "Thread": "threads",
    "Runnable": "threads",
    "reflect": "reflection",
    "forName": "reflection",
    "getClass": "reflection",
    "CallwitnessTracer": "the reserved tracer class name",
}

TRACER_CLASS = "CallwitnessTracer"


# expressions


@dataclass
class Literal:
    jtype: str  # int | long | double | boolean | String | char | null
    value: object
    line: int = 0


@dataclass
class Name:
    ident: str
    line: int = 0


@dataclass
class This:
    line: int = 0


@dataclass
class FieldGet:
    target: object  # expression; Name may denote a class for statics
    name: str
    line: int = 0


@dataclass
class Call:
    target: object  # None = unqualified, "super" = super call, else expression
    name: str
    args: list
    line: int = 0


@dataclass
class New:
    type_name: str
    args: list
    line: int = 0


@dataclass
class NewArray:
    elem_type: str
    dims: list  # size expressions; empty when an initializer is given
    init: object  # ArrayLit or None
    line: int = 0


@dataclass
class ArrayLit:
    elems: list
    line: int = 0


@dataclass
class Index:
    arr: object
    idx: object
    line: int = 0


@dataclass
class Assign:
    target: object
    op: str  # "=", "+=", ...
    value: object
    line: int = 0


@dataclass
class Unary:
    op: str
    operand: object
    prefix: bool = True
    line: int = 0


@dataclass
class Binary:
    op: str
    left: object
    right: object
    line: int = 0


@dataclass
class Ternary:
    cond: object
    then: object
    orelse: object
    line: int = 0


@dataclass
class Cast:
    type_name: str
    expr: object
    line: int = 0


@dataclass
class InstanceOf:
    expr: object
    type_name: str
    line: int = 0


# statements


@dataclass
class Block:
    stmts: list
    open: int = 0
    close: int = 0


@dataclass
class LocalVar:
    type_name: str
    declarators: list  # (name, init expression or None)
    line: int = 0


@dataclass
class ExprStmt:
    expr: object
    line: int = 0


@dataclass
class If:
    cond: object
    then: object
    orelse: object = None


@dataclass
class While:
    cond: object
    body: object = None


@dataclass
class DoWhile:
    body: object
    cond: object = None


@dataclass
class For:
    init: object  # LocalVar, list of expressions, or None
    cond: object
    updates: list
    body: object = None


@dataclass
class ForEach:
    type_name: str
    var: str
    iterable: object
    body: object = None


@dataclass
class Return:
    expr: object = None
    line: int = 0


@dataclass
class Break:
    line: int = 0


@dataclass
class Continue:
    line: int = 0


@dataclass
class Throw:
    expr: object = None
    line: int = 0


@dataclass
class Catch:
    type_name: str
    var: str
    block: object = None


@dataclass
class Try:
    block: object
    catches: list = field(default_factory=list)
    finally_block: object = None


@dataclass
class Switch:
    expr: object
    cases: list = field(default_factory=list)  # (label expr or None, stmts)


@dataclass
class Delegate:
    """Explicit this(...)/super(...) as a constructor's first statement."""

    kind: str  # "this" | "super"
    args: list = field(default_factory=list)
    line: int = 0
    end_offset: int = 0  # just after the ';'


# declarations


@dataclass
class Param:
    type_name: str
    name: str


@dataclass
class MethodDecl:
    owner: str
    name: str
    params: list
    return_type: str
    is_static: bool
    is_abstract: bool
    body: Block | None
    probe_offset: int
    body_close: int
    line: int
    end_line: int

    @property
    def signature(self) -> str:
        return ", ".join(p.type_name for p in self.params)


@dataclass
class CtorDecl:
    owner: str
    params: list
    body: Block
    delegation: Delegate | None
    probe_offset: int
    body_close: int
    line: int
    end_line: int

    @property
    def signature(self) -> str:
        return ", ".join(p.type_name for p in self.params)


@dataclass
class FieldDecl:
    owner: str
    type_name: str
    is_static: bool
    declarators: list  # (name, init or None)
    line: int


@dataclass
class ClassDecl:
    name: str
    superclass: str | None
    interfaces: list
    fields: list = field(default_factory=list)
    methods: list = field(default_factory=list)
    ctors: list = field(default_factory=list)
    is_abstract: bool = False
    line: int = 0


@dataclass
class InterfaceDecl:
    name: str
    extends: list = field(default_factory=list)
    methods: list = field(default_factory=list)  # MethodDecl with body=None
    line: int = 0


@dataclass
class CompilationUnit:
    classes: list  # ClassDecl in source order, nested ones flattened
    interfaces: list
    end_offset: int

    def class_map(self) -> dict:
        return {c.name: c for c in self.classes}


@dataclass(frozen=True)
class JavaMethodEntry:
    name: QualifiedName  # carries the signature
    kind: str  # static_method | instance_method | constructor
    owner_class: str
    span: tuple[int, int]


@dataclass(frozen=True)
class JavaMethodInventory:
    methods: tuple[JavaMethodEntry, ...]

    def names(self) -> list[QualifiedName]:
        return [m.name for m in self.methods]


def parse_java_unit(source: str, trusted: bool = False) -> CompilationUnit:
    """Full parse; the compile check for the subset.

    trusted=True skips the reserved-identifier screen so instrumented output
    (which names the tracer class) can be parsed back; the subset gate always
    parses untrusted.
    """
    return _Parser(source, trusted).parse_unit()


def parse_java_subset(source: str) -> JavaMethodInventory:
    """Inventory of every declared method and constructor in the file.

    Requires a public static void main(String[]) entry point somewhere.
    """
    return inventory_of(parse_java_unit(source))


def inventory_of(unit: CompilationUnit) -> JavaMethodInventory:
    entries = []
    has_main = False
    for cls in unit.classes:
        for ctor in cls.ctors:
            qn = QualifiedName(Language.JAVA, (cls.name, "<init>"), ctor.signature)
            entries.append(
                JavaMethodEntry(qn, "constructor", cls.name, (ctor.line, ctor.end_line))
            )
        for m in cls.methods:
            if m.is_abstract:
                continue
            if (
                m.name == "main"
                and m.is_static
                and m.return_type == "void"
                and len(m.params) == 1
                and m.params[0].type_name == "String[]"
            ):
                has_main = True
            qn = QualifiedName(Language.JAVA, (cls.name, m.name), m.signature)
            kind = "static_method" if m.is_static else "instance_method"
            entries.append(JavaMethodEntry(qn, kind, cls.name, (m.line, m.end_line)))
    if not has_main:
        raise MissingEntryPointError("no public static void main(String[]) found")
    return JavaMethodInventory(tuple(entries))


class _Parser:
    def __init__(self, source: str, trusted: bool = False):
        self.src = source
        self.trusted = trusted
        self.toks = tokenize(source)
        self.i = 0
        self.classes: list[ClassDecl] = []
        self.interfaces: list[InterfaceDecl] = []
        self.type_names: set[str] = set()

    # cursor

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def accept_punct(self, text: str) -> Token | None:
        if self.peek().is_punct(text):
            return self.advance()
        return None

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if not tok.is_punct(text):
            raise self.err(f"expected {text!r}, got {tok.text!r}", tok)
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.err(f"expected an identifier, got {tok.text!r}", tok)
        self._check_ident(tok)
        return self.advance()

    def err(self, message: str, tok: Token) -> UnsupportedConstructError:
        return UnsupportedConstructError(message, line=tok.line)

    def _check_ident(self, tok: Token):
        if self.trusted:
            return
        reason = FORBIDDEN_IDENTIFIERS.get(tok.text)
        if reason is not None:
            raise self.err(f"{tok.text} ({reason}) is outside the traceable subset", tok)
        if tok.text.startswith("__cw_"):
            raise self.err("identifier prefix '__cw_' is reserved", tok)

    # top level

    def parse_unit(self) -> CompilationUnit:
        self._reject_scan()
        if self.peek().is_kw("package"):
            self.advance()
            self.expect_ident()
            while self.accept_punct("."):
                self.expect_ident()
            self.expect_punct(";")
        while self.peek().is_kw("import"):
            self._import_decl()
        while self.peek().kind != "eof":
            mods = self._modifiers()
            tok = self.peek()
            if tok.is_kw("class"):
                self._class_decl(mods)
            elif tok.is_kw("interface"):
                self._interface_decl()
            else:
                raise self.err(f"expected a class or interface, got {tok.text!r}", tok)
        if not self.classes:
            raise UnsupportedConstructError("no class declarations in file")
        return CompilationUnit(self.classes, self.interfaces, len(self.src))

    def _reject_scan(self):
        for tok in self.toks:
            if tok.is_punct("->"):
                raise self.err("lambda expressions", tok)
            if tok.is_punct("::"):
                raise self.err("method references", tok)
            if tok.is_punct("..."):
                raise self.err("varargs", tok)
            if tok.is_kw("enum"):
                raise self.err("enum declarations", tok)
            if tok.is_kw("goto"):
                raise self.err("goto", tok)
            if tok.is_kw("assert"):
                raise self.err("assert statements", tok)
            if tok.kind == "keyword" and tok.text in REJECTED_MODIFIERS:
                raise self.err(f"the {tok.text} modifier", tok)
            if tok.kind == "ident":
                self._check_ident(tok)

    def _import_decl(self):
        start = self.advance()
        parts = [self.expect_ident().text]
        while self.accept_punct("."):
            if self.accept_punct("*"):
                parts.append("*")
                break
            parts.append(self.expect_ident().text)
        self.expect_punct(";")
        dotted = ".".join(parts)
        if dotted not in ALLOWED_IMPORTS:
            raise self.err(f"import {dotted} is outside the traceable subset", start)

    def _modifiers(self) -> set[str]:
        mods = set()
        while True:
            tok = self.peek()
            if tok.kind == "keyword" and tok.text in MODIFIERS:
                mods.add(tok.text)
                self.advance()
            elif tok.is_punct("@"):
                self.advance()
                anno = self.expect_ident()
                if self.peek().is_punct("("):
                    raise self.err("annotations with arguments", anno)
            else:
                return mods

    def _register_type_name(self, tok: Token):
        if tok.text in self.type_names:
            raise self.err(f"duplicate type name {tok.text}", tok)
        self.type_names.add(tok.text)

    def _class_decl(self, mods: set[str]):
        self.advance()  # 'class'
        name_tok = self.expect_ident()
        self._register_type_name(name_tok)
        if self.peek().is_punct("<"):
            raise self.err("generic class declarations", self.peek())
        superclass = None
        interfaces: list[str] = []
        if self.peek().is_kw("extends"):
            self.advance()
            superclass = self._type_text()
        if self.peek().is_kw("implements"):
            self.advance()
            interfaces.append(self._type_text())
            while self.accept_punct(","):
                interfaces.append(self._type_text())
        cls = ClassDecl(
            name_tok.text, superclass, interfaces,
            is_abstract="abstract" in mods, line=name_tok.line,
        )
        self.classes.append(cls)
        self.expect_punct("{")
        while not self.peek().is_punct("}"):
            if self.peek().kind == "eof":
                raise self.err("unterminated class body", self.peek())
            self._member(cls)
        self.advance()
        self.accept_punct(";")

    def _interface_decl(self):
        self.advance()  # 'interface'
        name_tok = self.expect_ident()
        self._register_type_name(name_tok)
        if self.peek().is_punct("<"):
            raise self.err("generic interface declarations", self.peek())
        extends: list[str] = []
        if self.peek().is_kw("extends"):
            self.advance()
            extends.append(self._type_text())
            while self.accept_punct(","):
                extends.append(self._type_text())
        decl = InterfaceDecl(name_tok.text, extends, line=name_tok.line)
        self.interfaces.append(decl)
        self.expect_punct("{")
        while not self.peek().is_punct("}"):
            tok = self.peek()
            if tok.kind == "eof":
                raise self.err("unterminated interface body", tok)
            if tok.is_kw("default", "static"):
                raise self.err("default/static interface methods", tok)
            self._modifiers()
            rtype = self._type_text()
            m_name = self.expect_ident()
            params = self._params()
            if not self.peek().is_punct(";"):
                raise self.err("interface methods must be abstract", self.peek())
            self.advance()
            decl.methods.append(
                MethodDecl(
                    decl.name, m_name.text, params, rtype, False, True, None,
                    0, 0, m_name.line, m_name.line,
                )
            )
        self.advance()
        self.accept_punct(";")

    def _member(self, cls: ClassDecl):
        if self.accept_punct(";"):
            return
        mods = self._modifiers()
        tok = self.peek()
        if tok.is_kw("class"):
            if "static" not in mods:
                raise self.err("inner (non-static) nested classes", tok)
            self._class_decl(mods)
            return
        if tok.is_kw("interface"):
            self._interface_decl()
            return
        if tok.is_punct("<"):
            raise self.err("generic method declarations", tok)
        if tok.is_punct("{"):
            raise self.err("instance/static initializer blocks", tok)
        # constructor: ClassName (
        if tok.kind == "ident" and tok.text == cls.name and self.peek(1).is_punct("("):
            self._ctor(cls)
            return
        rtype = self._type_text()
        name_tok = self.expect_ident()
        if self.peek().is_punct("("):
            self._method(cls, mods, rtype, name_tok)
        else:
            self._field(cls, mods, rtype, name_tok)

    def _ctor(self, cls: ClassDecl):
        name_tok = self.advance()
        params = self._params()
        if self.peek().is_kw("throws"):
            self._throws()
        open_tok = self.peek()
        if not open_tok.is_punct("{"):
            raise self.err("constructor needs a body", open_tok)
        full = self._block()
        delegation = None
        stmts = full.stmts
        probe_offset = open_tok.end
        if stmts and isinstance(stmts[0], Delegate):
            delegation = stmts[0]
            stmts = stmts[1:]
            probe_offset = delegation.end_offset
        self._reject_delegates(stmts, name_tok)
        body = Block(stmts, full.open, full.close)
        cls.ctors.append(
            CtorDecl(
                cls.name, params, body, delegation, probe_offset, body.close,
                name_tok.line, self.toks[self.i - 1].line,
            )
        )

    def _reject_delegates(self, stmts, where: Token):
        """this(...)/super(...) are first-statement-of-constructor only."""
        for stmt in stmts:
            if isinstance(stmt, Delegate):
                raise UnsupportedConstructError(
                    "constructor delegation must be the first statement",
                    line=stmt.line,
                )
            for child in _child_statements(stmt):
                self._reject_delegates([child], where)

    def _method(self, cls: ClassDecl, mods: set[str], rtype: str, name_tok: Token):
        params = self._params()
        if self.peek().is_kw("throws"):
            self._throws()
        is_static = "static" in mods
        is_abstract = "abstract" in mods
        if self.accept_punct(";"):
            if not is_abstract:
                raise self.err("methods need a body (or the abstract modifier)", name_tok)
            if not cls.is_abstract:
                raise self.err("abstract method in a non-abstract class", name_tok)
            cls.methods.append(
                MethodDecl(
                    cls.name, name_tok.text, params, rtype, is_static, True, None,
                    0, 0, name_tok.line, name_tok.line,
                )
            )
            return
        open_tok = self.peek()
        if not open_tok.is_punct("{"):
            raise self.err("expected a method body", open_tok)
        body = self._block()
        self._reject_delegates(body.stmts, name_tok)
        cls.methods.append(
            MethodDecl(
                cls.name, name_tok.text, params, rtype, is_static, False, body,
                open_tok.end, body.close, name_tok.line, self.toks[self.i - 1].line,
            )
        )

    def _field(self, cls: ClassDecl, mods: set[str], type_name: str, name_tok: Token):
        declarators = [(name_tok.text, self._field_init())]
        while self.accept_punct(","):
            nxt = self.expect_ident()
            declarators.append((nxt.text, self._field_init()))
        self.expect_punct(";")
        cls.fields.append(
            FieldDecl(cls.name, type_name, "static" in mods, declarators, name_tok.line)
        )

    def _field_init(self):
        if self.accept_punct("="):
            if self.peek().is_punct("{"):
                return self._array_lit()
            return self._expr()
        return None

    def _params(self) -> list[Param]:
        self.expect_punct("(")
        params: list[Param] = []
        if not self.peek().is_punct(")"):
            while True:
                if self.peek().is_kw("final"):
                    self.advance()
                ptype = self._type_text()
                pname = self.expect_ident()
                params.append(Param(ptype, pname.text))
                if not self.accept_punct(","):
                    break
        self.expect_punct(")")
        return params

    def _throws(self):
        self.advance()
        self._type_text()
        while self.accept_punct(","):
            self._type_text()

    # types

    def _type_text(self) -> str:
        """Parse a type, returning its erased text (generics dropped)."""
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in PRIMITIVES:
            self.advance()
            base = tok.text
        elif tok.kind == "ident":
            self._check_ident(tok)
            self.advance()
            base = tok.text
            while self.peek().is_punct(".") and self.peek(1).kind == "ident":
                self.advance()
                base += "." + self.expect_ident().text
        else:
            raise self.err(f"expected a type, got {tok.text!r}", tok)
        if self.peek().is_punct("<"):
            self._skip_type_args()
        while self.peek().is_punct("[") and self.peek(1).is_punct("]"):
            self.advance()
            self.advance()
            base += "[]"
        return base

    def _skip_type_args(self):
        self.expect_punct("<")
        depth = 1
        while depth > 0:
            tok = self.advance()
            if tok.kind == "eof":
                raise self.err("unterminated type arguments", tok)
            if tok.is_punct("<"):
                depth += 1
            elif tok.is_punct(">"):
                depth -= 1
            elif tok.is_punct("(", ")", "{", "}", ";"):
                raise self.err("malformed type arguments", tok)

    def _looks_like_type(self) -> int | None:
        """Return token count of a leading Type+Ident declarator, else None."""
        j = self.i
        toks = self.toks

        def at(k):
            return toks[min(j + k, len(toks) - 1)]

        k = 0
        tok = at(k)
        if tok.kind == "keyword" and tok.text in PRIMITIVES and tok.text != "void":
            k += 1
        elif tok.kind == "ident":
            k += 1
            while at(k).is_punct(".") and at(k + 1).kind == "ident":
                k += 2
            if at(k).is_punct("<"):
                depth = 1
                k += 1
                while depth > 0:
                    t = at(k)
                    if t.kind == "eof" or t.is_punct("(", ")", "{", "}", ";"):
                        return None
                    if t.is_punct("<"):
                        depth += 1
                    elif t.is_punct(">"):
                        depth -= 1
                    k += 1
        else:
            return None
        while at(k).is_punct("[") and at(k + 1).is_punct("]"):
            k += 2
        if at(k).kind != "ident":
            return None
        after = at(k + 1)
        if after.is_punct("=", ";", ","):
            return k + 1
        return None

    # statements

    def _block(self) -> Block:
        open_tok = self.expect_punct("{")
        stmts = []
        while not self.peek().is_punct("}"):
            if self.peek().kind == "eof":
                raise self.err("unterminated block", self.peek())
            stmts.append(self._statement())
        close_tok = self.advance()
        return Block(stmts, open_tok.start, close_tok.start)

    def _statement(self):
        tok = self.peek()
        if tok.is_punct("{"):
            return self._block()
        if tok.is_punct(";"):
            self.advance()
            return Block([])
        if tok.is_kw("if"):
            self.advance()
            self.expect_punct("(")
            cond = self._expr()
            self.expect_punct(")")
            then = self._statement()
            orelse = None
            if self.peek().is_kw("else"):
                self.advance()
                orelse = self._statement()
            return If(cond, then, orelse)
        if tok.is_kw("while"):
            self.advance()
            self.expect_punct("(")
            cond = self._expr()
            self.expect_punct(")")
            return While(cond, self._statement())
        if tok.is_kw("do"):
            self.advance()
            body = self._statement()
            if not self.peek().is_kw("while"):
                raise self.err("do without while", self.peek())
            self.advance()
            self.expect_punct("(")
            cond = self._expr()
            self.expect_punct(")")
            self.expect_punct(";")
            return DoWhile(body, cond)
        if tok.is_kw("for"):
            return self._for()
        if tok.is_kw("return"):
            self.advance()
            if self.accept_punct(";"):
                return Return(None, tok.line)
            expr = self._expr()
            self.expect_punct(";")
            return Return(expr, tok.line)
        if tok.is_kw("break"):
            self.advance()
            if self.peek().kind == "ident":
                raise self.err("labeled break", self.peek())
            self.expect_punct(";")
            return Break(tok.line)
        if tok.is_kw("continue"):
            self.advance()
            if self.peek().kind == "ident":
                raise self.err("labeled continue", self.peek())
            self.expect_punct(";")
            return Continue(tok.line)
        if tok.is_kw("throw"):
            self.advance()
            expr = self._expr()
            self.expect_punct(";")
            return Throw(expr, tok.line)
        if tok.is_kw("try"):
            return self._try()
        if tok.is_kw("switch"):
            return self._switch()
        if tok.is_kw("this", "super") and self.peek(1).is_punct("("):
            # constructor delegation; legality is checked by the caller
            kind = self.advance().text
            args = self._args()
            end = self.expect_punct(";")
            return Delegate(kind, args, tok.line, end.end)
        if tok.kind == "ident" and self.peek(1).is_punct(":"):
            raise self.err("labeled statements", tok)
        decl_len = self._looks_like_type()
        if decl_len is not None:
            return self._local_var()
        expr = self._expr()
        self.expect_punct(";")
        return ExprStmt(expr, tok.line)

    def _local_var(self) -> LocalVar:
        line = self.peek().line
        type_name = self._type_text()
        declarators = []
        while True:
            name_tok = self.expect_ident()
            init = None
            if self.accept_punct("="):
                if self.peek().is_punct("{"):
                    init = self._array_lit()
                else:
                    init = self._expr()
            declarators.append((name_tok.text, init))
            if not self.accept_punct(","):
                break
        self.expect_punct(";")
        return LocalVar(type_name, declarators, line)

    def _for(self):
        self.advance()
        self.expect_punct("(")
        # foreach: Type name : iterable
        save = self.i
        if self._looks_like_foreach():
            type_name = self._type_text()
            var = self.expect_ident()
            self.expect_punct(":")
            iterable = self._expr()
            self.expect_punct(")")
            return ForEach(type_name, var.text, iterable, self._statement())
        self.i = save
        init = None
        if not self.accept_punct(";"):
            if self._looks_like_type() is not None:
                line = self.peek().line
                type_name = self._type_text()
                declarators = []
                while True:
                    name_tok = self.expect_ident()
                    val = None
                    if self.accept_punct("="):
                        val = self._expr()
                    declarators.append((name_tok.text, val))
                    if not self.accept_punct(","):
                        break
                init = LocalVar(type_name, declarators, line)
            else:
                init = [self._expr()]
                while self.accept_punct(","):
                    init.append(self._expr())
            self.expect_punct(";")
        cond = None
        if not self.peek().is_punct(";"):
            cond = self._expr()
        self.expect_punct(";")
        updates = []
        if not self.peek().is_punct(")"):
            updates.append(self._expr())
            while self.accept_punct(","):
                updates.append(self._expr())
        self.expect_punct(")")
        return For(init, cond, updates, self._statement())

    def _looks_like_foreach(self) -> bool:
        save = self.i
        try:
            self._type_text()
            if self.peek().kind != "ident":
                return False
            self.advance()
            return self.peek().is_punct(":")
        except UnsupportedConstructError:
            return False
        finally:
            self.i = save

    def _try(self):
        self.advance()
        if self.peek().is_punct("("):
            raise self.err("try-with-resources", self.peek())
        block = self._block()
        catches = []
        while self.peek().is_kw("catch"):
            self.advance()
            self.expect_punct("(")
            ctype = self._type_text()
            if self.peek().is_punct("|"):
                raise self.err("multi-catch clauses", self.peek())
            var = self.expect_ident()
            self.expect_punct(")")
            catches.append(Catch(ctype, var.text, self._block()))
        finally_block = None
        if self.peek().is_kw("finally"):
            self.advance()
            finally_block = self._block()
        if not catches and finally_block is None:
            raise self.err("try without catch or finally", self.peek())
        return Try(block, catches, finally_block)

    def _switch(self):
        self.advance()
        self.expect_punct("(")
        expr = self._expr()
        self.expect_punct(")")
        self.expect_punct("{")
        cases = []
        current = None
        while not self.peek().is_punct("}"):
            tok = self.peek()
            if tok.kind == "eof":
                raise self.err("unterminated switch", tok)
            if tok.is_kw("case"):
                self.advance()
                label = self._expr()
                if self.peek().is_punct("->"):
                    raise self.err("arrow switch cases", self.peek())
                self.expect_punct(":")
                current = (label, [])
                cases.append(current)
            elif tok.is_kw("default"):
                self.advance()
                self.expect_punct(":")
                current = (None, [])
                cases.append(current)
            else:
                if current is None:
                    raise self.err("statement before first switch case", tok)
                current[1].append(self._statement())
        self.advance()
        return Switch(expr, cases)

    # expressions

    def _args(self) -> list:
        self.expect_punct("(")
        args = []
        if not self.peek().is_punct(")"):
            args.append(self._expr())
            while self.accept_punct(","):
                args.append(self._expr())
        self.expect_punct(")")
        return args

    def _expr(self):
        return self._assignment()

    def _assignment(self):
        left = self._ternary()
        tok = self.peek()
        if tok.is_punct("=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="):
            op = self.advance().text
            value = self._assignment()
            return Assign(left, op, value, tok.line)
        if tok.is_punct(">") and self._gt_combined() in (">>=", ">>>="):
            op = self._consume_gt()
            value = self._assignment()
            return Assign(left, op, value, tok.line)
        return left

    def _gt_combined(self) -> str:
        """Longest operator formed by adjacent tokens starting at '>'."""
        toks = self.toks
        j = self.i
        if not toks[j].is_punct(">"):
            return ""
        text = ">"
        k = j + 1
        while len(text) < 3 and toks[k].is_punct(">") and toks[k].start == toks[k - 1].end:
            text += ">"
            k += 1
        if toks[k].is_punct("=") and toks[k].start == toks[k - 1].end:
            text += "="
        return text

    def _consume_gt(self) -> str:
        op = self._gt_combined()
        for _ in range(len(op)):
            self.advance()
        return op

    def _ternary(self):
        cond = self._or()
        if self.peek().is_punct("?"):
            line = self.advance().line
            then = self._expr()
            self.expect_punct(":")
            orelse = self._ternary()
            return Ternary(cond, then, orelse, line)
        return cond

    def _binary_level(self, sub, ops):
        expr = sub()
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text in ops:
                self.advance()
                expr = Binary(tok.text, expr, sub(), tok.line)
            else:
                return expr

    def _or(self):
        return self._binary_level(self._and, {"||"})

    def _and(self):
        return self._binary_level(self._bitor, {"&&"})

    def _bitor(self):
        return self._binary_level(self._bitxor, {"|"})

    def _bitxor(self):
        return self._binary_level(self._bitand, {"^"})

    def _bitand(self):
        return self._binary_level(self._equality, {"&"})

    def _equality(self):
        return self._binary_level(self._relational, {"==", "!="})

    def _relational(self):
        expr = self._shift()
        while True:
            tok = self.peek()
            if tok.is_kw("instanceof"):
                self.advance()
                expr = InstanceOf(expr, self._type_text(), tok.line)
                continue
            if tok.is_punct("<", "<="):
                self.advance()
                expr = Binary(tok.text, expr, self._shift(), tok.line)
                continue
            if tok.is_punct(">"):
                combined = self._gt_combined()
                if combined in (">", ">="):
                    op = self._consume_gt()
                    expr = Binary(op, expr, self._shift(), tok.line)
                    continue
            return expr

    def _shift(self):
        expr = self._additive()
        while True:
            tok = self.peek()
            if tok.is_punct("<<"):
                self.advance()
                expr = Binary("<<", expr, self._additive(), tok.line)
                continue
            if tok.is_punct(">"):
                combined = self._gt_combined()
                if combined in (">>", ">>>"):
                    op = self._consume_gt()
                    expr = Binary(op, expr, self._additive(), tok.line)
                    continue
            return expr

    def _additive(self):
        return self._binary_level(self._multiplicative, {"+", "-"})

    def _multiplicative(self):
        return self._binary_level(self._unary, {"*", "/", "%"})

    def _unary(self):
        tok = self.peek()
        if tok.is_punct("+", "-", "!", "~"):
            self.advance()
            return Unary(tok.text, self._unary(), True, tok.line)
        if tok.is_punct("++", "--"):
            self.advance()
            return Unary(tok.text, self._unary(), True, tok.line)
        if tok.is_punct("(") and self._cast_ahead():
            self.advance()
            type_name = self._type_text()
            self.expect_punct(")")
            return Cast(type_name, self._unary(), tok.line)
        return self._postfix()

    def _cast_ahead(self) -> bool:
        """Distinguish `(Type) expr` casts from parenthesized expressions."""
        toks = self.toks
        j = self.i + 1
        tok = toks[j]
        primitive = False
        if tok.kind == "keyword" and tok.text in PRIMITIVES and tok.text != "void":
            primitive = True
            j += 1
        elif tok.kind == "ident":
            j += 1
            while toks[j].is_punct(".") and toks[j + 1].kind == "ident":
                j += 2
        else:
            return False
        while toks[j].is_punct("[") and toks[j + 1].is_punct("]"):
            j += 2
            primitive = True  # (Foo[]) can only be a cast
        if not toks[j].is_punct(")"):
            return False
        after = toks[j + 1]
        if primitive:
            return True  # (int) -x is always a cast
        if after.kind in ("ident", "num", "str", "char"):
            return True
        if after.is_punct("(") or after.is_punct("!"):
            return True
        if after.is_kw("new", "this"):
            return True
        # (x) - y parses as subtraction, not a cast of -y
        return False

    def _postfix(self):
        expr = self._primary()
        while True:
            tok = self.peek()
            if tok.is_punct("."):
                self.advance()
                name = self.expect_ident()
                if self.peek().is_punct("("):
                    args = self._args()
                    expr = Call(expr, name.text, args, name.line)
                else:
                    expr = FieldGet(expr, name.text, name.line)
            elif tok.is_punct("["):
                self.advance()
                idx = self._expr()
                self.expect_punct("]")
                expr = Index(expr, idx, tok.line)
            elif tok.is_punct("++", "--"):
                self.advance()
                expr = Unary(tok.text, expr, False, tok.line)
            else:
                return expr

    def _primary(self):
        tok = self.peek()
        if tok.kind == "num":
            return self._num_literal(self.advance())
        if tok.kind == "str":
            self.advance()
            return Literal("String", _unescape(tok.text[1:-1], tok), tok.line)
        if tok.kind == "char":
            self.advance()
            value = _unescape(tok.text[1:-1], tok)
            if len(value) != 1:
                raise self.err("bad char literal", tok)
            return Literal("char", value, tok.line)
        if tok.kind == "ident":
            if tok.text == "true":
                self.advance()
                return Literal("boolean", True, tok.line)
            if tok.text == "false":
                self.advance()
                return Literal("boolean", False, tok.line)
            if tok.text == "null":
                self.advance()
                return Literal("null", None, tok.line)
            self._check_ident(tok)
            self.advance()
            if self.peek().is_punct("("):
                return Call(None, tok.text, self._args(), tok.line)
            return Name(tok.text, tok.line)
        if tok.is_kw("this"):
            self.advance()
            if self.peek().is_punct("("):
                raise self.err("this(...) is only legal as the first constructor statement", tok)
            return This(tok.line)
        if tok.is_kw("super"):
            self.advance()
            if self.peek().is_punct("("):
                raise self.err("super(...) is only legal as the first constructor statement", tok)
            self.expect_punct(".")
            name = self.expect_ident()
            if not self.peek().is_punct("("):
                raise self.err("super field access", name)
            return Call("super", name.text, self._args(), name.line)
        if tok.is_kw("new"):
            return self._new()
        if tok.is_punct("("):
            self.advance()
            expr = self._expr()
            self.expect_punct(")")
            return expr
        raise self.err(f"unexpected token {tok.text!r} in expression", tok)

    def _num_literal(self, tok: Token) -> Literal:
        text = tok.text.replace("_", "")
        suffix = text[-1] if text and text[-1] in "fFdDlL" else ""
        if suffix:
            text = text[:-1]
        try:
            if suffix in ("f", "F", "d", "D") or "." in text or (
                "e" in text.lower() and not text.lower().startswith("0x")
            ):
                return Literal("double", float(text), tok.line)
            if suffix in ("l", "L"):
                return Literal("long", int(text, 0), tok.line)
            return Literal("int", int(text, 0), tok.line)
        except ValueError:
            raise self.err(f"bad numeric literal {tok.text!r}", tok) from None

    def _new(self):
        tok = self.advance()
        if self.peek().is_punct("."):
            raise self.err("new.target-style syntax", tok)
        type_tok = self.peek()
        type_name = self._type_text()
        if type_name.endswith("[]"):
            # new int[]{...}
            elem = type_name[:-2]
            init = self._array_lit()
            return NewArray(elem, [], init, tok.line)
        if self.peek().is_punct("["):
            dims = []
            while self.accept_punct("["):
                if self.peek().is_punct("]"):
                    raise self.err("arrays with unsized dimensions", self.peek())
                dims.append(self._expr())
                self.expect_punct("]")
            if not dims:
                raise self.err("array creation needs a length or initializer", tok)
            return NewArray(type_name, dims, None, tok.line)
        args = self._args()
        if self.peek().is_punct("{"):
            raise self.err("anonymous classes", self.peek())
        if type_tok.kind == "keyword":
            raise self.err(f"cannot instantiate primitive {type_name}", type_tok)
        return New(type_name, args, tok.line)

    def _array_lit(self) -> ArrayLit:
        open_tok = self.expect_punct("{")
        elems = []
        if not self.peek().is_punct("}"):
            while True:
                if self.peek().is_punct("{"):
                    elems.append(self._array_lit())
                else:
                    elems.append(self._expr())
                if not self.accept_punct(","):
                    break
                if self.peek().is_punct("}"):
                    break  # trailing comma
        self.expect_punct("}")
        return ArrayLit(elems, open_tok.line)


def _child_statements(stmt):
    """Direct child statements of a statement node, for tree walks."""
    if isinstance(stmt, Block):
        return list(stmt.stmts)
    if isinstance(stmt, If):
        return [s for s in (stmt.then, stmt.orelse) if s is not None]
    if isinstance(stmt, (While, DoWhile, For, ForEach)):
        return [stmt.body] if stmt.body is not None else []
    if isinstance(stmt, Try):
        out = [stmt.block] + [c.block for c in stmt.catches]
        if stmt.finally_block is not None:
            out.append(stmt.finally_block)
        return out
    if isinstance(stmt, Switch):
        return [s for _, stmts in stmt.cases for s in stmts]
    return []


def _unescape(text: str, tok: Token) -> str:
    out = []
    i = 0
    escapes = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
               "0": "\0", "'": "'", '"': '"', "\\": "\\"}
    while i < len(text):
        c = text[i]
        if c == "\\":
            i += 1
            if i >= len(text):
                raise UnsupportedConstructError("bad escape sequence", line=tok.line)
            e = text[i]
            if e == "u":
                code = text[i + 1 : i + 5]
                if len(code) != 4:
                    raise UnsupportedConstructError("bad unicode escape", line=tok.line)
                out.append(chr(int(code, 16)))
                i += 5
                continue
            if e not in escapes:
                raise UnsupportedConstructError(
                    f"unsupported escape \\{e}", line=tok.line
                )
            out.append(escapes[e])
            i += 1
        else:
            out.append(c)
            i += 1
    return "".join(out)
