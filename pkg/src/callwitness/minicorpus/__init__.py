"""Bundled hand-oracled programs covering every traced construct class.

Each program ships with its edge set derived by reading the source, not by
running the tracer, so the pair (program, oracle) can catch tracer
regressions. The special/ directory holds the validator counterexamples:
a known-good program, a one-cross-edge program, and a branch that flips on
the trace path so repeated runs disagree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..schema import Language, ProgramInstance

_EXT = {Language.JAVASCRIPT: "js", Language.JAVA: "java", Language.PYTHON: "py"}
BUNDLED_REPO = "bundled/minicorpus"


@dataclass(frozen=True)
class OracledProgram:
    """One bundled program plus its hand-derived expectations."""

    instance: ProgramInstance
    edges: frozenset[tuple[str, str]]  # (caller text, callee text)
    stdout: str


def _read(relpath: str) -> str:
    return (resources.files(__package__) / relpath).read_text(encoding="utf-8")


def _oracles() -> dict:
    return json.loads(_read("oracles.json"))


def load_minicorpus(language: Language) -> list[OracledProgram]:
    """All oracled programs for one language, ordered by program id."""
    entries = _oracles()[language.value]
    programs = []
    for pid in sorted(entries):
        source = _read(f"{language.value}/{pid}.{_EXT[language]}")
        instance = ProgramInstance.create(pid, language, source, BUNDLED_REPO)
        programs.append(
            OracledProgram(
                instance=instance,
                edges=frozenset(tuple(e) for e in entries[pid]["edges"]),
                stdout=entries[pid]["stdout"],
            )
        )
    return programs


def load_special(name: str) -> ProgramInstance:
    """One validator counterexample program by name."""
    entry = _oracles()["special"][name]
    language = Language(entry["language"])
    source = _read(f"special/{name}.{_EXT[language]}")
    return ProgramInstance.create(name, language, source, BUNDLED_REPO)


def special_expectation(name: str) -> str:
    """What the validator should conclude: 'accepted' or a failure kind."""
    return _oracles()["special"][name]["expect"]
