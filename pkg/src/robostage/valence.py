"""Role valence, exponentially decaying character context, and step deltas.

Each character carries a running context ``c``. When the character plays a
role with valence ``v`` in the current action, ``c <- beta*v + (1-beta)*c``.
The step change ``c_i - c_{i-1}`` decides whether the character moves
toward or away from the other focal character. Every context starts at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .kb import ActionEntry, Role

if TYPE_CHECKING:
    from .config import EngineConfig
    from .kb import ActionKB
    from .script import Script


class Direction(str, Enum):
    TOWARD = "toward"
    AWAY = "away"
    NONE = "none"


class Connective(str, Enum):
    BUT = "but"
    SO = "so"
    THEN = "then"


_CONNECTIVE_RANK = {Connective.THEN: 0, Connective.SO: 1, Connective.BUT: 2}


@dataclass(frozen=True)
class HistoryEntry:
    index: int
    valence: float
    context: float
    delta: float


@dataclass(frozen=True)
class ValenceState:
    character_id: str
    context: float = 0.0
    history: tuple[HistoryEntry, ...] = ()
    initial_context: float = 0.0

    @property
    def previous_context(self) -> float:
        """Context before the most recent update."""
        if len(self.history) >= 2:
            return self.history[-2].context
        return self.initial_context


@dataclass(frozen=True)
class Delta:
    value: float
    significant: bool
    direction: Direction

    @classmethod
    def of(cls, value: float, tau: float) -> Delta:
        significant = abs(value) >= tau
        if not significant:
            direction = Direction.NONE
        elif value > 0:
            direction = Direction.TOWARD
        else:
            direction = Direction.AWAY
        return cls(value, significant, direction)


def role_valence(entry: ActionEntry, role: Role | str) -> int:
    """Sum of the four emotional scales for ``role`` in ``entry``."""
    return entry.scales(role).total()


def update_context(state: ValenceState, valence: float, beta: float) -> ValenceState:
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie strictly between 0 and 1, got {beta}")
    context = beta * valence + (1.0 - beta) * state.context
    entry = HistoryEntry(len(state.history), valence, context, context - state.context)
    return ValenceState(state.character_id, context, state.history + (entry,), state.initial_context)


def delta(state: ValenceState, tau: float) -> Delta:
    """Change produced by the most recent update (zero before any update)."""
    if not state.history:
        return Delta.of(0.0, tau)
    return Delta.of(state.context - state.previous_context, tau)


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def classify_connective(prev_context: float, valence: float, d: float, cfg: EngineConfig) -> Connective:
    """Which connective the emotional shift of one character warrants."""
    sp, sv = _sign(prev_context), _sign(valence)
    flipped = sp != 0 and sv != 0 and sp != sv
    if flipped and abs(d) >= cfg.connective_but:
        return Connective.BUT
    if abs(d) >= cfg.connective_so:
        return Connective.SO
    return Connective.THEN


def strongest(connectives) -> Connective:
    return max(connectives, key=_CONNECTIVE_RANK.__getitem__, default=Connective.THEN)


def arousal_level(entry: ActionEntry, role: Role | str) -> int:
    return entry.arousal(role)


@dataclass(frozen=True)
class CharacterStep:
    character_id: str
    role: Role
    valence: int
    prev_context: float
    context: float
    delta: Delta
    connective: Connective
    arousal: int


@dataclass(frozen=True)
class StepValence:
    index: int
    action_id: str
    by_character: dict[str, CharacterStep]
    connective: Connective

    def for_role(self, role: Role) -> CharacterStep:
        for step in self.by_character.values():
            if step.role is role:
                return step
        raise KeyError(role)


def run_valence(script: Script, kb: ActionKB, cfg: EngineConfig) -> list[StepValence]:
    """Run the context recurrence for both characters over the whole script.

    The step connective is the strongest of the two characters' connectives
    (but > so > then).
    """
    states = {c.id: ValenceState(c.id) for c in script.characters}
    steps = []
    for action in script.actions:
        entry = kb[action.action_id]
        per_char = {}
        for char, role in ((action.agent, Role.AGENT), (action.patient, Role.PATIENT)):
            state = states[char.id]
            v = role_valence(entry, role)
            new_state = update_context(state, v, cfg.decay_weight)
            d = delta(new_state, cfg.step_threshold)
            per_char[char.id] = CharacterStep(
                character_id=char.id,
                role=role,
                valence=v,
                prev_context=state.context,
                context=new_state.context,
                delta=d,
                connective=classify_connective(state.context, v, d.value, cfg),
                arousal=arousal_level(entry, role),
            )
            states[char.id] = new_state
        per_char = {c.id: per_char[c.id] for c in script.characters}
        steps.append(
            StepValence(action.index, action.action_id, per_char, strongest(s.connective for s in per_char.values()))
        )
    return steps
