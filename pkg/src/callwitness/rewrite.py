"""Insertion-only source rewriting shared by the JS and Java instrumenters.

Probes are pure insertions at recorded offsets of the original text, plus a
prelude prepended in front. Keeping every rewrite insertion-only is what makes
the strip invariant trivial to state: delete the insertions, drop the prelude,
and the original bytes are back.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Insertion:
    """Text to insert at a character offset of the original source."""

    offset: int
    text: str


def apply_insertions(
    source: str, prelude: str, insertions: list[Insertion]
) -> tuple[str, tuple[tuple[int, str], ...]]:
    """Build the instrumented text.

    Returns (text, applied) where applied lists each inserted chunk with its
    position in the final text, ascending; insertions sharing an offset keep
    their list order.
    """
    ordered = sorted(enumerate(insertions), key=lambda p: (p[1].offset, p[0]))
    parts = [prelude]
    applied = []
    cursor = 0
    shift = len(prelude)
    for _, ins in ordered:
        if ins.offset < cursor:
            raise ValueError(f"insertion offset {ins.offset} out of order")
        if ins.offset > len(source):
            raise ValueError(f"insertion offset {ins.offset} beyond source end")
        parts.append(source[cursor : ins.offset])
        applied.append((ins.offset + shift, ins.text))
        parts.append(ins.text)
        shift += len(ins.text)
        cursor = ins.offset
    parts.append(source[cursor:])
    return "".join(parts), tuple(applied)


@dataclass(frozen=True)
class InstrumentedSource:
    """An instrumented program plus everything needed to undo it."""

    text: str
    inventory: object
    prelude_lines: int
    _prelude_len: int
    _applied: tuple[tuple[int, str], ...]

    def strip(self) -> str:
        """Recover the original source text, byte for byte."""
        out = self.text
        for pos, chunk in reversed(self._applied):
            if out[pos : pos + len(chunk)] != chunk:
                raise ValueError("instrumented text was modified; cannot strip probes")
            out = out[:pos] + out[pos + len(chunk) :]
        return out[self._prelude_len :]
