"""Hand-rolled JavaScript tokenizer.

Produces a flat token list with source offsets, which is all the subset
validator and the insertion-based instrumenter need. Comments and whitespace
are consumed but not emitted. Template literals become a single token carrying
their interpolation slices so the parser can police what happens inside
``${...}`` without a full grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import UnsupportedConstructError

PUNCTUATORS = [
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "**", "<<", ">>",
    "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".", "#",
]

KEYWORDS = {
    "async", "await", "break", "case", "catch", "class", "const", "continue",
    "debugger", "default", "delete", "do", "else", "export", "extends",
    "finally", "for", "function", "if", "import", "in", "instanceof", "let",
    "new", "of", "return", "static", "super", "switch", "this", "throw", "try",
    "typeof", "var", "void", "while", "with", "yield",
}

# After one of these a `/` starts a regex literal, not division.
_REGEX_PRECEDERS = {
    "(", ",", "=", ":", "[", "!", "&", "|", "?", "{", "}", ";", "=>",
    "==", "===", "!=", "!==", "<", ">", "<=", ">=", "+", "-", "*", "%",
    "&&", "||", "??", "return", "typeof", "case", "in", "of", "instanceof",
    "new", "delete", "void", "throw", "do", "else",
}

_ID_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_ID_CONT = _ID_START | set("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | num | str | template | regex | punct | eof
    text: str
    start: int
    end: int  # exclusive
    line: int
    # template tokens only: [(offset_of_expr_start, expr_text), ...]
    interpolations: tuple = field(default=(), compare=False)

    def is_punct(self, *texts: str) -> bool:
        return self.kind == "punct" and self.text in texts

    def is_kw(self, *words: str) -> bool:
        return self.kind == "keyword" and self.text in words


def tokenize(source: str) -> list[Token]:
    return _Lexer(source).run()


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.tokens: list[Token] = []

    def error(self, message: str) -> UnsupportedConstructError:
        return UnsupportedConstructError(message, line=self.line)

    def run(self) -> list[Token]:
        src, n = self.src, len(self.src)
        while self.pos < n:
            ch = src[self.pos]
            if ch == "\n":
                self.line += 1
                self.pos += 1
            elif ch in " \t\r\f\v":
                self.pos += 1
            elif src.startswith("//", self.pos):
                nl = src.find("\n", self.pos)
                self.pos = n if nl < 0 else nl
            elif src.startswith("/*", self.pos):
                self._block_comment()
            elif ch in "'\"":
                self._string(ch)
            elif ch == "`":
                self._template()
            elif ch == "/" and self._regex_position():
                self._regex()
            elif ch in _ID_START:
                self._ident()
            elif ch.isdigit() or (ch == "." and self.pos + 1 < n and src[self.pos + 1].isdigit()):
                self._number()
            else:
                self._punct()
        self.tokens.append(Token("eof", "", n, n, self.line))
        return self.tokens

    def _emit(self, kind, start, end, interpolations=(), line=None):
        self.tokens.append(
            Token(
                kind, self.src[start:end], start, end,
                self.line if line is None else line, tuple(interpolations),
            )
        )

    def _block_comment(self):
        end = self.src.find("*/", self.pos + 2)
        if end < 0:
            raise self.error("unterminated block comment")
        self.line += self.src.count("\n", self.pos, end)
        self.pos = end + 2

    def _string(self, quote):
        src, n = self.src, len(self.src)
        start = self.pos
        i = self.pos + 1
        while i < n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                raise self.error("newline in string literal")
            if c == quote:
                self._emit("str", start, i + 1)
                self.pos = i + 1
                return
            i += 1
        raise self.error("unterminated string literal")

    def _template(self):
        """One token for the whole literal, nested templates included."""
        src, n = self.src, len(self.src)
        start = self.pos
        start_line = self.line
        interpolations = []
        i = self.pos + 1
        while i < n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                self.line += 1
                i += 1
                continue
            if c == "`":
                self._emit("template", start, i + 1, interpolations, line=start_line)
                self.pos = i + 1
                return
            if c == "$" and i + 1 < n and src[i + 1] == "{":
                expr_start = i + 2
                i = self._skip_braced(expr_start)
                interpolations.append((expr_start, src[expr_start : i - 1]))
                continue
            i += 1
        raise self.error("unterminated template literal")

    def _skip_braced(self, i):
        """Scan past an interpolation body; returns index just after its `}`."""
        src, n = self.src, len(self.src)
        depth = 1
        while i < n:
            c = src[i]
            if c == "\n":
                self.line += 1
            elif c in "'\"":
                i = self._skip_simple_string(i)
                continue
            elif c == "`":
                i = self._skip_nested_template(i)
                continue
            elif c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
        raise self.error("unterminated template interpolation")

    def _skip_simple_string(self, i):
        src, n = self.src, len(self.src)
        quote = src[i]
        i += 1
        while i < n:
            if src[i] == "\\":
                i += 2
                continue
            if src[i] == quote:
                return i + 1
            i += 1
        raise self.error("unterminated string literal")

    def _skip_nested_template(self, i):
        src, n = self.src, len(self.src)
        i += 1
        while i < n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                self.line += 1
                i += 1
                continue
            if c == "`":
                return i + 1
            if c == "$" and i + 1 < n and src[i + 1] == "{":
                i = self._skip_braced(i + 2)
                continue
            i += 1
        raise self.error("unterminated template literal")

    def _regex_position(self) -> bool:
        if not self.tokens:
            return True
        prev = self.tokens[-1]
        if prev.kind in ("ident", "num", "str", "template", "regex"):
            return False
        if prev.kind == "keyword":
            return prev.text in _REGEX_PRECEDERS
        return prev.text in _REGEX_PRECEDERS

    def _regex(self):
        src, n = self.src, len(self.src)
        start = self.pos
        i = self.pos + 1
        in_class = False
        while i < n:
            c = src[i]
            if c == "\\":
                i += 2
                continue
            if c == "\n":
                raise self.error("unterminated regex literal")
            if c == "[":
                in_class = True
            elif c == "]":
                in_class = False
            elif c == "/" and not in_class:
                i += 1
                while i < n and src[i] in _ID_CONT:
                    i += 1  # flags
                self._emit("regex", start, i)
                self.pos = i
                return
            i += 1
        raise self.error("unterminated regex literal")

    def _ident(self):
        src, n = self.src, len(self.src)
        start = self.pos
        i = self.pos + 1
        while i < n and src[i] in _ID_CONT:
            i += 1
        text = src[start:i]
        self._emit("keyword" if text in KEYWORDS else "ident", start, i)
        self.pos = i

    def _number(self):
        src, n = self.src, len(self.src)
        start = self.pos
        i = self.pos
        if src.startswith(("0x", "0X", "0b", "0B", "0o", "0O"), i):
            i += 2
            while i < n and src[i] in _ID_CONT:
                i += 1
        else:
            while i < n and (src[i].isdigit() or src[i] in ".eE"):
                if src[i] in "eE" and i + 1 < n and src[i + 1] in "+-":
                    i += 1
                i += 1
        self._emit("num", start, i)
        self.pos = i

    def _punct(self):
        for op in PUNCTUATORS:
            if self.src.startswith(op, self.pos):
                self._emit("punct", self.pos, self.pos + len(op))
                self.pos += len(op)
                return
        raise self.error(f"unexpected character {self.src[self.pos]!r}")
