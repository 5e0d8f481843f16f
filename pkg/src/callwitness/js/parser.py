"""Validator and function-inventory collector for the traceable JS subset.

This is not a full ECMAScript parser. It walks the token stream with just
enough structure to (a) reject everything outside the subset loudly with a
line number, and (b) record every inventory function with the exact body
offsets the instrumenter needs.

In the subset: function declarations, const/let-bound function and arrow
expressions, class declarations with methods and constructors, the standard
statement and expression grammar, spread/rest, template literals.

Rejected: eval/Function, with, import/export/require, generators, async or
await, timer APIs, getters and setters, computed member names, class fields,
anonymous inline callbacks, destructuring declarations, labeled statements,
tagged templates, and identifiers that collide with the probe namespace.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from ..errors import UnsupportedConstructError
from ..schema import Language, QualifiedName
from .lexer import Token, tokenize

FORBIDDEN_KEYWORDS = {
    "with": "the with statement",
    "import": "import declarations",
    "export": "export declarations",
    "yield": "generators",
    "await": "await",
    "async": "async functions",
}

FORBIDDEN_IDENTIFIERS = {
    "eval": "eval",
    "Function": "the Function constructor",
    "setTimeout": "timer APIs",
    "setInterval": "timer APIs",
    "setImmediate": "timer APIs",
    "queueMicrotask": "timer APIs",
    "require": "module imports",
    "process": "the process global",
    "globalThis": "the globalThis object",
}

RESERVED_PREFIX = "__cw_"

# Tokens that may continue an expression across a newline; anything else
# after a line break terminates the statement (minimal ASI).
_CONTINUER_PUNCT = {
    ".", "(", "[", "+", "-", "*", "/", "%", "**", "?.", "?", ":", ",", "=>",
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "&=", "|=", "^=", "<<=", ">>=",
    ">>>=", "&&=", "||=", "??=", "==", "===", "!=", "!==", "<", "<=", ">",
    ">=", "&&", "||", "??", "&", "|", "^", "<<", ">>", ">>>",
}

_GROUP_CLOSER = {"(": ")", "[": "]"}


@dataclass(frozen=True)
class InventoryEntry:
    """One traceable function as exposed to the rest of the toolkit."""

    name: QualifiedName
    kind: str  # function_decl | arrow_const | class_method | class_constructor
    span: tuple[int, int]  # 1-based source lines, inclusive


@dataclass(frozen=True)
class FunctionInventory:
    module: str
    functions: tuple[InventoryEntry, ...]

    def names(self) -> list[QualifiedName]:
        return [e.name for e in self.functions]


@dataclass
class JsFunction:
    """Inventory entry plus the offsets the instrumenter rewrites at."""

    entry: InventoryEntry
    body_open: int | None = None  # offset of the body '{'
    body_close: int | None = None  # offset of the matching '}'
    expr_start: int | None = None  # expression-bodied arrows only
    expr_end: int | None = None  # exclusive


def parse_js_subset(
    source: str, module_name: str, trusted: bool = False
) -> FunctionInventory:
    """Validate the subset and collect the function inventory.

    trusted=True skips the reserved-prefix screen so instrumented output
    (whose probes use reserved names) can be parsed back; the subset gate
    always parses untrusted.
    """
    fns = parse_js_functions(source, module_name, trusted)
    return FunctionInventory(module_name, tuple(f.entry for f in fns))


def parse_js_functions(
    source: str, module_name: str, trusted: bool = False
) -> list[JsFunction]:
    parser = _Parser(source, module_name, trusted)
    parser.run()
    return parser.fns


class _Parser:
    def __init__(self, source: str, module: str, trusted: bool = False):
        self.src = source
        self.module = module
        self.trusted = trusted
        self.toks = tokenize(source)
        self.i = 0
        self.fns: list[JsFunction] = []
        self.seen: set[QualifiedName] = set()
        self.line_starts = [0] + [m.end() for m in re.finditer(r"\n", source)]

    # cursor helpers

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if not tok.is_punct(text):
            raise self.err(f"expected {text!r}", tok)
        return self.advance()

    def err(self, message: str, tok: Token) -> UnsupportedConstructError:
        return UnsupportedConstructError(message, line=tok.line)

    def line_of(self, offset: int) -> int:
        return bisect.bisect_right(self.line_starts, offset)

    # entry

    def run(self):
        self._prepass(self.toks)
        while self.peek().kind != "eof":
            self.statement((self.module,))

    def _prepass(self, tokens):
        for tok in tokens:
            if tok.kind == "keyword" and tok.text in FORBIDDEN_KEYWORDS:
                raise self.err(
                    f"{FORBIDDEN_KEYWORDS[tok.text]} (outside the traceable subset)", tok
                )
            if tok.kind == "ident" and not self.trusted:
                if tok.text in FORBIDDEN_IDENTIFIERS:
                    raise self.err(
                        f"{FORBIDDEN_IDENTIFIERS[tok.text]} cannot be traced soundly", tok
                    )
                if tok.text.startswith(RESERVED_PREFIX):
                    raise self.err(f"identifier prefix {RESERVED_PREFIX!r} is reserved", tok)
            if tok.kind == "template":
                for _, expr_text in tok.interpolations:
                    try:
                        inner = tokenize(expr_text)
                        self._prepass(inner)
                        for it in inner:
                            if it.is_punct("=>") or it.is_kw("function"):
                                raise UnsupportedConstructError("function expression")
                    except UnsupportedConstructError as exc:
                        raise self.err(f"in template interpolation: {exc}", tok) from None

    # statements

    def statement(self, scope: tuple[str, ...]):
        tok = self.peek()
        if tok.is_kw("function"):
            self.function_decl(scope)
        elif tok.is_kw("class"):
            if len(scope) > 1:
                raise self.err("nested class declarations", tok)
            self.class_decl(scope)
        elif tok.is_kw("const", "let", "var"):
            self.var_statement(scope, tok.text)
        elif tok.is_kw("if"):
            self.advance()
            self.group(scope, "(")
            self.statement(scope)
            if self.peek().is_kw("else"):
                self.advance()
                self.statement(scope)
        elif tok.is_kw("for", "while"):
            self.advance()
            self.group(scope, "(")
            self.statement(scope)
        elif tok.is_kw("do"):
            self.advance()
            self.statement(scope)
            if not self.peek().is_kw("while"):
                raise self.err("do without while", self.peek())
            self.advance()
            self.group(scope, "(")
            if self.peek().is_punct(";"):
                self.advance()
        elif tok.is_kw("switch"):
            self.switch_statement(scope)
        elif tok.is_kw("try"):
            self.advance()
            self.block(scope)
            handled = False
            if self.peek().is_kw("catch"):
                handled = True
                self.advance()
                if self.peek().is_punct("("):
                    self.group(scope, "(")
                self.block(scope)
            if self.peek().is_kw("finally"):
                handled = True
                self.advance()
                self.block(scope)
            if not handled:
                raise self.err("try without catch or finally", tok)
        elif tok.is_kw("return", "throw"):
            self.advance()
            nxt = self.peek()
            if nxt.is_punct(";"):
                self.advance()
            elif nxt.is_punct("}") or nxt.kind == "eof" or nxt.line > tok.line:
                if tok.text == "throw":
                    raise self.err("throw needs an expression on the same line", tok)
            else:
                self.expr_statement_tail(scope)
        elif tok.is_kw("break", "continue"):
            self.advance()
            nxt = self.peek()
            if nxt.kind == "ident" and nxt.line == tok.line:
                raise self.err("labeled statements", nxt)
            if nxt.is_punct(";"):
                self.advance()
        elif tok.is_kw("debugger"):
            self.advance()
            if self.peek().is_punct(";"):
                self.advance()
        elif tok.is_punct("{"):
            self.block(scope)
        elif tok.is_punct(";"):
            self.advance()
        elif tok.kind == "eof":
            return
        else:
            if tok.kind == "ident" and self.peek(1).is_punct(":"):
                raise self.err("labeled statements", tok)
            self.expr_statement_tail(scope)

    def block(self, scope: tuple[str, ...]) -> Token:
        self.expect_punct("{")
        while not self.peek().is_punct("}"):
            if self.peek().kind == "eof":
                raise self.err("unterminated block", self.peek())
            self.statement(scope)
        return self.advance()

    def switch_statement(self, scope):
        self.advance()
        self.group(scope, "(")
        self.expect_punct("{")
        while True:
            tok = self.peek()
            if tok.is_punct("}"):
                self.advance()
                return
            if tok.is_kw("case"):
                self.advance()
                self.scan_until(scope, stoppers={":"})
                self.expect_punct(":")
            elif tok.is_kw("default"):
                self.advance()
                self.expect_punct(":")
            elif tok.kind == "eof":
                raise self.err("unterminated switch", tok)
            else:
                self.statement(scope)

    def expr_statement_tail(self, scope):
        """Expression statement body with minimal semicolon inference."""
        prev = None
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            if tok.is_punct(";"):
                self.advance()
                return
            if tok.is_punct("}"):
                return
            if (
                prev is not None
                and tok.line > prev.line
                and self._can_end(prev)
                and not self._continues(tok)
            ):
                return
            prev = self.expr_token(scope)

    def _can_end(self, tok: Token) -> bool:
        if tok.kind in ("ident", "num", "str", "template", "regex"):
            return True
        return tok.is_punct(")", "]", "}", "++", "--") or tok.is_kw("this", "super")

    def _continues(self, tok: Token) -> bool:
        if tok.kind == "punct":
            return tok.text in _CONTINUER_PUNCT
        if tok.kind == "template":
            return True  # would be a tagged template; rejected downstream
        return tok.is_kw("instanceof", "in")

    # declarations

    def var_statement(self, scope, binding_kw: str):
        self.advance()
        while True:
            tok = self.peek()
            if tok.is_punct("{", "["):
                raise self.err("destructuring declarations", tok)
            if tok.kind != "ident":
                raise self.err(f"expected a variable name, got {tok.text!r}", tok)
            name_tok = self.advance()
            nxt = self.peek()
            if nxt.is_punct("="):
                self.advance()
                rhs = self.peek()
                if rhs.is_kw("function") or self._arrow_ahead():
                    if binding_kw == "var":
                        raise self.err(
                            "function values must be const or let bound", rhs
                        )
                    if rhs.is_kw("function"):
                        self.function_expr(scope, name_tok)
                    else:
                        self.arrow_binding(scope, name_tok)
                    after = self.peek()
                    if not after.is_punct(";"):
                        raise self.err(
                            "expected ';' after a function-valued declaration", after
                        )
                    self.advance()
                    return
                stop = self.scan_until(scope, stoppers={",", ";"}, asi_after=name_tok)
                if stop == ",":
                    self.advance()
                    continue
                if stop == ";":
                    self.advance()
                return
            if nxt.is_punct(","):
                self.advance()
                continue
            if nxt.is_punct(";"):
                self.advance()
                return
            if nxt.kind == "eof" or nxt.is_punct("}") or nxt.line > name_tok.line:
                return
            raise self.err(f"unexpected token {nxt.text!r} in declaration", nxt)

    def _arrow_ahead(self) -> bool:
        tok = self.peek()
        if tok.kind == "ident" and self.peek(1).is_punct("=>"):
            return True
        if not tok.is_punct("("):
            return False
        depth = 0
        j = self.i
        while j < len(self.toks):
            t = self.toks[j]
            if t.is_punct("("):
                depth += 1
            elif t.is_punct(")"):
                depth -= 1
                if depth == 0:
                    k = j + 1
                    return k < len(self.toks) and self.toks[k].is_punct("=>")
            elif t.kind == "eof":
                return False
            j += 1
        return False

    def register(self, fn: JsFunction, at: int):
        if fn.entry.name in self.seen:
            raise UnsupportedConstructError(
                f"duplicate function name {fn.entry.name.text}", line=fn.entry.span[0]
            )
        self.seen.add(fn.entry.name)
        self.fns.insert(at, fn)

    def _qualname(self, scope, name: str) -> QualifiedName:
        return QualifiedName(Language.JAVASCRIPT, scope + (name,))

    def function_decl(self, scope):
        start = self.advance()  # 'function'
        if self.peek().is_punct("*"):
            raise self.err("generator functions", self.peek())
        name_tok = self.peek()
        if name_tok.kind != "ident":
            raise self.err("function declarations need a name", name_tok)
        self.advance()
        self._function_tail(scope, name_tok.text, "function_decl", start)

    def function_expr(self, scope, bound_name: Token):
        start = self.advance()  # 'function'
        if self.peek().is_punct("*"):
            raise self.err("generator functions", self.peek())
        if self.peek().kind == "ident":
            self.advance()  # inner self-reference name; inventory uses the binding
        self._function_tail(scope, bound_name.text, "arrow_const", start)

    def _function_tail(self, scope, name: str, kind: str, start_tok: Token):
        self.group(scope, "(")
        open_tok = self.peek()
        if not open_tok.is_punct("{"):
            raise self.err("expected a function body", open_tok)
        slot = len(self.fns)
        close_tok = self.block(scope + (name,))
        entry = InventoryEntry(
            self._qualname(scope, name), kind, (start_tok.line, close_tok.line)
        )
        self.register(
            JsFunction(entry, body_open=open_tok.start, body_close=close_tok.start), slot
        )

    def arrow_binding(self, scope, name_tok: Token):
        if self.peek().kind == "ident":
            self.advance()
        else:
            self.group(scope, "(")
        self.expect_punct("=>")
        body = self.peek()
        if body.is_punct("{"):
            slot = len(self.fns)
            close_tok = self.block(scope + (name_tok.text,))
            entry = InventoryEntry(
                self._qualname(scope, name_tok.text),
                "arrow_const",
                (name_tok.line, close_tok.line),
            )
            self.register(
                JsFunction(entry, body_open=body.start, body_close=close_tok.start), slot
            )
            return
        # expression body: runs to the terminating semicolon
        expr_start = body.start
        slot = len(self.fns)
        stop = self.scan_until(scope, stoppers={";", ","})
        if stop == ",":
            raise self.err("multiple declarators with a function value", self.peek())
        if stop != ";":
            raise self.err(
                "expected ';' after a function-valued declaration", self.peek()
            )
        expr_end = self.toks[self.i - 1].end
        if expr_end <= expr_start:
            raise self.err("empty arrow body", body)
        entry = InventoryEntry(
            self._qualname(scope, name_tok.text),
            "arrow_const",
            (name_tok.line, self.line_of(expr_end - 1)),
        )
        self.register(JsFunction(entry, expr_start=expr_start, expr_end=expr_end), slot)

    def class_decl(self, scope):
        self.advance()  # 'class'
        name_tok = self.peek()
        if name_tok.kind != "ident":
            raise self.err("class declarations need a name", name_tok)
        self.advance()
        if self.peek().is_kw("extends"):
            self.advance()
            base = self.peek()
            if base.kind != "ident":
                raise self.err("extends must name a class", base)
            self.advance()
        self.expect_punct("{")
        while True:
            tok = self.peek()
            if tok.is_punct("}"):
                self.advance()
                return
            if tok.is_punct(";"):
                self.advance()
                continue
            if tok.kind == "eof":
                raise self.err("unterminated class body", tok)
            if tok.is_kw("static"):
                self.advance()
                if self.peek().is_punct("{"):
                    raise self.err("static initializer blocks", self.peek())
                tok = self.peek()
            if tok.is_punct("*"):
                raise self.err("generator methods", tok)
            if tok.is_punct("["):
                raise self.err("computed member names", tok)
            if tok.is_punct("#"):
                raise self.err("private class members", tok)
            if tok.kind != "ident":
                raise self.err(f"unsupported class member {tok.text!r}", tok)
            if tok.text in ("get", "set") and self.peek(1).kind == "ident":
                raise self.err("getter/setter accessors", tok)
            name = self.advance()
            after = self.peek()
            if not after.is_punct("("):
                raise self.err("class fields", after)
            self.group((self.module, name_tok.text), "(")
            open_tok = self.peek()
            if not open_tok.is_punct("{"):
                raise self.err("expected a method body", open_tok)
            method_scope = (self.module, name_tok.text)
            slot = len(self.fns)
            close_tok = self.block(method_scope + (name.text,))
            kind = "class_constructor" if name.text == "constructor" else "class_method"
            entry = InventoryEntry(
                self._qualname(method_scope, name.text), kind, (name.line, close_tok.line)
            )
            self.register(
                JsFunction(entry, body_open=open_tok.start, body_close=close_tok.start),
                slot,
            )

    # expression scanning

    def scan_until(self, scope, stoppers: set[str], asi_after: Token | None = None) -> str:
        """Consume expression tokens until a depth-0 stopper punct.

        Returns the stopper text (not consumed), "}" when the enclosing block
        closes, or "" at EOF/ASI boundary.
        """
        prev = asi_after
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return ""
            if tok.kind == "punct" and tok.text in stoppers:
                return tok.text
            if tok.is_punct("}"):
                return "}"
            if tok.is_punct(")", "]"):
                raise self.err(f"unbalanced {tok.text!r}", tok)
            if (
                prev is not None
                and tok.line > prev.line
                and self._can_end(prev)
                and not self._continues(tok)
            ):
                return ""
            prev = self.expr_token(scope)

    def expr_token(self, scope) -> Token:
        """Consume one expression construct; returns its last token."""
        tok = self.peek()
        if tok.is_kw("function"):
            raise self.err("anonymous inline function expressions", tok)
        if tok.is_punct("=>"):
            raise self.err("inline arrow functions (bind them with const)", tok)
        if tok.is_kw("new") and self.peek(1).is_punct("."):
            raise self.err("new.target", tok)
        if tok.is_punct("#"):
            raise self.err("private class members", tok)
        if tok.kind == "template":
            j = self.i - 1
            if j >= 0:
                before = self.toks[j]
                if before.kind == "ident" or before.is_punct(")", "]"):
                    raise self.err("tagged template literals", tok)
            return self.advance()
        if tok.is_punct("("):
            self.advance()
            self.group(scope, "(", already_open=True)
            return self.toks[self.i - 1]
        if tok.is_punct("["):
            self.advance()
            self.group(scope, "[", already_open=True)
            return self.toks[self.i - 1]
        if tok.is_punct("{"):
            self.object_literal(scope)
            return self.toks[self.i - 1]
        return self.advance()

    def group(self, scope, opener: str, already_open: bool = False):
        """Consume a balanced (...) or [...] region, validating contents."""
        if not already_open:
            self.expect_punct(opener)
        closer = _GROUP_CLOSER[opener]
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                raise self.err(f"unbalanced {opener!r}", tok)
            if tok.is_punct(closer):
                self.advance()
                return
            if tok.is_punct(")" if closer == "]" else "]"):
                raise self.err(f"unbalanced {tok.text!r}", tok)
            if tok.is_punct("}"):
                raise self.err("unbalanced '}'", tok)
            if tok.is_punct(";") and opener == "(":
                self.advance()  # for(;;) headers
                continue
            self.expr_token(scope)

    def object_literal(self, scope):
        self.expect_punct("{")
        while True:
            tok = self.peek()
            if tok.is_punct("}"):
                self.advance()
                return
            if tok.kind == "eof":
                raise self.err("unterminated object literal", tok)
            if tok.is_punct(","):
                self.advance()
                continue
            if tok.is_punct("..."):
                self.advance()
                self.scan_until(scope, stoppers={",", "}"})
                continue
            if tok.is_punct("["):
                raise self.err("computed member names", tok)
            if tok.kind in ("ident", "keyword", "str", "num"):
                if (
                    tok.kind == "ident"
                    and tok.text in ("get", "set")
                    and self.peek(1).kind == "ident"
                ):
                    raise self.err("getter/setter accessors", tok)
                self.advance()
                after = self.peek()
                if after.is_punct("("):
                    raise self.err(
                        "object literal methods (use a class or a const function)", after
                    )
                if after.is_punct(":", "="):
                    self.advance()
                    self.scan_until(scope, stoppers={",", "}"})
                    continue
                if after.is_punct(",") or after.is_punct("}"):
                    continue  # shorthand property
                raise self.err(f"unsupported object literal member {after.text!r}", after)
            raise self.err(f"unsupported object literal member {tok.text!r}", tok)
