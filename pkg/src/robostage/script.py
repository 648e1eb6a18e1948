"""Plot-script data model and the line-oriented script DSL.

Grammar (one statement per line, ``#`` starts a comment)::

    script     = { blank } header { action | blank }
    header     = "characters" ":" decl "," decl
    decl       = char_id "=" name
    action     = [ connective ] char_id action_id char_id
    connective = "but" | "then" | "so"
    char_id    = /[A-Za-z][A-Za-z0-9_]*/
    action_id  = /[a-z][a-z0-9._-]*/
    name       = any text without "," or "#"

Exactly two characters are declared; every action names both, one as the
agent (role A) and the other as the patient (role B).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .config import EngineConfig
    from .kb import ActionKB

CONNECTIVES = ("but", "then", "so")
_CHAR_ID = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_ACTION_ID = re.compile(r"[a-z][a-z0-9._-]*\Z")
_TOKEN = re.compile(r"\S+")


class ScriptError(ValueError):
    """A positioned problem with script source."""

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


class ScriptSyntaxError(ScriptError):
    pass


class UndeclaredCharacterError(ScriptError):
    pass


class DuplicateCharacterError(ScriptError):
    pass


@dataclass(frozen=True)
class Character:
    id: str
    display_name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PlotAction:
    index: int
    action_id: str
    agent: Character
    patient: Character
    connective_in: str | None = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Script:
    characters: tuple[Character, ...]
    actions: tuple[PlotAction, ...]

    def character(self, char_id: str) -> Character:
        for c in self.characters:
            if c.id == char_id:
                return c
        raise KeyError(char_id)

    def other(self, char_id: str) -> Character:
        for c in self.characters:
            if c.id != char_id:
                return c
        raise KeyError(char_id)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


def _strip_comment(text: str) -> str:
    i = text.find("#")
    return text if i < 0 else text[:i]


def _parse_header(text: str, lineno: int) -> tuple[Character, ...]:
    m = re.match(r"(\s*)characters(\s*):", text)
    if not m:
        first = _TOKEN.search(text)
        col = first.start() + 1 if first else 1
        raise ScriptSyntaxError("script must start with a character declaration", lineno, col, ("'characters:'",))
    offset = m.end()
    decls = []
    seen: dict[str, Character] = {}
    for part in text[offset:].split(","):
        col = offset + (len(part) - len(part.lstrip())) + 1
        if "=" not in part:
            raise ScriptSyntaxError("malformed character declaration", lineno, col, ("<CharId>=<name>",))
        char_id, name = (s.strip() for s in part.split("=", 1))
        if not _CHAR_ID.match(char_id) or char_id in CONNECTIVES:
            raise ScriptSyntaxError(f"invalid character id {char_id!r}", lineno, col, ("<CharId>",))
        if not name:
            raise ScriptSyntaxError(f"character {char_id!r} has no name", lineno, col, ("<name>",))
        if char_id in seen:
            raise DuplicateCharacterError(f"duplicate character id {char_id!r}", lineno, col)
        seen[char_id] = Character(char_id, name, lineno, col)
        decls.append(seen[char_id])
        offset += len(part) + 1
    if len(decls) != 2:
        raise ScriptSyntaxError(
            f"exactly two focal characters are supported, got {len(decls)}; secondary figures are not supported",
            lineno,
            m.end() + 1,
        )
    return tuple(decls)


def parse_script(source: str | bytes) -> Script:
    """Parse script source into a :class:`Script`.

    Raises a :class:`ScriptError` subclass carrying line and column.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = bytes(source)[: exc.start]
            line = prefix.count(b"\n") + 1
            column = exc.start - (prefix.rfind(b"\n") + 1) + 1
            raise ScriptSyntaxError("source is not valid UTF-8", line, column) from None

    characters: tuple[Character, ...] | None = None
    by_id: dict[str, Character] = {}
    actions: list[PlotAction] = []
    lines = source.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        text = _strip_comment(raw)
        if not text.strip():
            continue
        if characters is None:
            characters = _parse_header(text, lineno)
            by_id = {c.id: c for c in characters}
            continue
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]
        connective = None
        line_col = tokens[0][1]
        if len(tokens) == 4:
            word, col = tokens[0]
            if word not in CONNECTIVES:
                raise ScriptSyntaxError(f"unexpected {word!r}", lineno, col, CONNECTIVES)
            connective = word
            tokens = tokens[1:]
        elif len(tokens) != 3:
            col = tokens[4][1] if len(tokens) > 4 else len(text.rstrip()) + 1
            expected = ("<CharId> <action_id> <CharId>",) if len(tokens) < 3 else ("end of line",)
            raise ScriptSyntaxError("malformed action line", lineno, col, expected)
        (agent_id, agent_col), (action_id, action_col), (patient_id, patient_col) = tokens
        for cid, col in ((agent_id, agent_col), (patient_id, patient_col)):
            if not _CHAR_ID.match(cid):
                raise ScriptSyntaxError(f"invalid character id {cid!r}", lineno, col, ("<CharId>",))
            if cid not in by_id:
                raise UndeclaredCharacterError(f"undeclared character {cid!r}", lineno, col, tuple(by_id))
        if not _ACTION_ID.match(action_id):
            raise ScriptSyntaxError(f"invalid action name {action_id!r}", lineno, action_col, ("[a-z][a-z0-9._-]*",))
        if agent_id == patient_id:
            raise ScriptSyntaxError(f"{agent_id!r} cannot act on themselves", lineno, patient_col)
        actions.append(
            PlotAction(
                index=len(actions),
                action_id=action_id,
                agent=by_id[agent_id],
                patient=by_id[patient_id],
                connective_in=connective,
                line=lineno,
                column=line_col,
            )
        )

    end_line = len(lines) + 1
    if characters is None:
        raise ScriptSyntaxError("empty script", end_line, 1, ("'characters:'",))
    if not actions:
        raise ScriptSyntaxError("script has no actions", end_line, 1, ("<CharId> <action_id> <CharId>",))
    return Script(characters, tuple(actions))


def serialize_script(script: Script) -> str:
    lines = ["characters: " + ", ".join(f"{c.id}={c.display_name}" for c in script.characters)]
    for a in script.actions:
        words = [a.connective_in] if a.connective_in else []
        words += [a.agent.id, a.action_id, a.patient.id]
        lines.append(" ".join(words))
    return "\n".join(lines) + "\n"


def validate_script(script: Script, kb: ActionKB, cfg: EngineConfig | None = None) -> list[Diagnostic]:
    """Check a parsed script against a knowledge base.

    Unknown actions are errors. When every action resolves, written
    connectives are compared against the ones the valence engine derives;
    mismatches are warnings.
    """
    from .config import EngineConfig
    from .valence import run_valence

    diags = []
    for a in script.actions:
        if a.action_id not in kb:
            diags.append(Diagnostic("error", f"unknown action {a.action_id!r}", a.line, a.column))
        if a.agent.id == a.patient.id or {a.agent.id, a.patient.id} != {c.id for c in script.characters}:
            diags.append(Diagnostic("error", f"action {a.action_id!r} needs two distinct roles", a.line, a.column))
    if diags:
        return diags

    steps = run_valence(script, kb, cfg or EngineConfig())
    for a, step in zip(script.actions, steps):
        if a.connective_in is not None and a.connective_in != step.connective.value:
            diags.append(
                Diagnostic(
                    "warning",
                    f"connective {a.connective_in!r} before {a.action_id!r}; emotional shift suggests {step.connective.value!r}",
                    a.line,
                    a.column,
                )
            )
    return diags
