"""Tokenizer for the Java subset.

Every run of '>' characters is emitted as single '>' tokens so the parser can
close nested generics; expression parsing re-joins adjacent '>' tokens into
shift and comparison operators by checking offsets.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UnsupportedConstructError

KEYWORDS = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while",
}

# '>' is always a single token; see module docstring.
PUNCTUATORS = [
    "<<=", "...", "->", "::", "<<", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "==", "!=", "<=",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", "=", ">", "<", "!", "~",
    "?", ":", "+", "-", "*", "/", "%", "&", "|", "^", "@",
]

_ID_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_ID_CONT = _ID_START | set("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | num | str | char | punct | eof
    text: str
    start: int
    end: int
    line: int

    def is_punct(self, *texts: str) -> bool:
        return self.kind == "punct" and self.text in texts

    def is_kw(self, *words: str) -> bool:
        return self.kind == "keyword" and self.text in words


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    n = len(source)

    def err(message: str) -> UnsupportedConstructError:
        return UnsupportedConstructError(message, line=line)

    while pos < n:
        ch = source[pos]
        if ch == "\n":
            line += 1
            pos += 1
            continue
        if ch in " \t\r\f":
            pos += 1
            continue
        if source.startswith("//", pos):
            nl = source.find("\n", pos)
            pos = n if nl < 0 else nl
            continue
        if source.startswith("/*", pos):
            close = source.find("*/", pos + 2)
            if close < 0:
                raise err("unterminated block comment")
            line += source.count("\n", pos, close)
            pos = close + 2
            continue
        if ch == '"':
            i = pos + 1
            while i < n:
                if source[i] == "\\":
                    i += 2
                    continue
                if source[i] == "\n":
                    raise err("newline in string literal")
                if source[i] == '"':
                    break
                i += 1
            else:
                raise err("unterminated string literal")
            tokens.append(Token("str", source[pos : i + 1], pos, i + 1, line))
            pos = i + 1
            continue
        if ch == "'":
            i = pos + 1
            while i < n:
                if source[i] == "\\":
                    i += 2
                    continue
                if source[i] == "'":
                    break
                i += 1
            else:
                raise err("unterminated char literal")
            tokens.append(Token("char", source[pos : i + 1], pos, i + 1, line))
            pos = i + 1
            continue
        if ch in _ID_START:
            i = pos + 1
            while i < n and source[i] in _ID_CONT:
                i += 1
            text = source[pos:i]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, pos, i, line))
            pos = i
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and source[pos + 1].isdigit()):
            i = pos
            if source.startswith(("0x", "0X", "0b", "0B"), i):
                i += 2
                while i < n and (source[i] in _ID_CONT or source[i] == "_"):
                    i += 1
            else:
                seen_dot = False
                while i < n:
                    c = source[i]
                    if c.isdigit() or c == "_":
                        i += 1
                    elif c == "." and not seen_dot and i + 1 < n and source[i + 1].isdigit():
                        seen_dot = True
                        i += 1
                    elif c in "eE" and i + 1 < n and (
                        source[i + 1].isdigit() or source[i + 1] in "+-"
                    ):
                        i += 2
                    elif c in "fFdDlL":
                        i += 1
                        break
                    else:
                        break
            tokens.append(Token("num", source[pos:i], pos, i, line))
            pos = i
            continue
        for op in PUNCTUATORS:
            if source.startswith(op, pos):
                tokens.append(Token("punct", op, pos, pos + len(op), line))
                pos += len(op)
                break
        else:
            raise err(f"unexpected character {ch!r}")
    tokens.append(Token("eof", "", n, n, line))
    return tokens
