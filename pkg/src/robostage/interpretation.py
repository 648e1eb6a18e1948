"""Per-role construal of plot actions and enactment selection.

A role either performs the scripted action literally, swaps in a
metaphorical target from the KB when its emotional context arms a link,
or (opt-in) performs the action the audience expected while still
speaking the scripted dialogue.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

from .config import EngineConfig
from .kb import ActionEntry, ActionKB, Appropriateness, GestureSpec, KBError, LinkMode, MetaphorLink, Role

logger = logging.getLogger(__name__)

# arousal at or above this restricts the draw to sweeping gestures when any exist
HIGH_AROUSAL = 2


class InterpretationError(ValueError):
    pass


class ConstrualKind(str, Enum):
    LITERAL = "literal"
    METAPHORIC = "metaphoric"
    IRONIC = "ironic"


@dataclass(frozen=True)
class Construal:
    kind: ConstrualKind
    source_action_id: str
    enacted_action_id: str
    spoken_action_id: str

    def __post_init__(self) -> None:
        if self.spoken_action_id != self.source_action_id:
            raise InterpretationError("dialogue always comes from the scripted action")
        if self.kind is ConstrualKind.LITERAL and self.enacted_action_id != self.source_action_id:
            raise InterpretationError("a literal construal enacts the scripted action")

    @classmethod
    def literal(cls, action_id: str) -> Construal:
        return cls(ConstrualKind.LITERAL, action_id, action_id, action_id)

    def to_dict(self) -> dict[str, str]:
        return {
            "kind": self.kind.value,
            "source_action_id": self.source_action_id,
            "enacted_action_id": self.enacted_action_id,
            "spoken_action_id": self.spoken_action_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Construal:
        return cls(ConstrualKind(d["kind"]), d["source_action_id"], d["enacted_action_id"], d["spoken_action_id"])


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def link_armed(link: MetaphorLink, prev_context: float, valence: float) -> bool:
    """Whether the context a role brings to an action arms ``link``.

    Shock links need the action to pull against the context (opposite,
    nonzero signs); reinforce links need it to push the same way. Either
    way the context magnitude must reach the link threshold.
    """
    sp, sv = _sign(prev_context), _sign(valence)
    if sp == 0 or sv == 0:
        return False
    if link.mode is LinkMode.SHOCK and sp == sv:
        return False
    if link.mode is LinkMode.REINFORCE and sp != sv:
        return False
    return abs(prev_context) >= link.threshold


def armed_links(entry: ActionEntry, prev_context: float, valence: float) -> list[MetaphorLink]:
    return [link for link in entry.metaphor_links if link_armed(link, prev_context, valence)]


def irony_armed(prev_context: float, valence: float, cfg: EngineConfig) -> bool:
    sp, sv = _sign(prev_context), _sign(valence)
    rift = sp != 0 and sv != 0 and sp != sv
    return cfg.irony_enabled and rift and abs(valence - prev_context) >= cfg.irony_threshold


def ironic_enactment(entry: ActionEntry, role: Role | str, expectation_action_id: str | None, kb: ActionKB) -> Construal:
    """Enact the expected action while speaking the scripted one."""
    role = Role.coerce(role)
    if not expectation_action_id:
        raise InterpretationError(f"{entry.action_id!r} declares no expectation action")
    if expectation_action_id not in kb:
        raise InterpretationError(f"expectation action {expectation_action_id!r} is not in the KB")
    if not kb[expectation_action_id].enactments(role):
        raise InterpretationError(f"expectation action {expectation_action_id!r} has no {role.label} enactment")
    return Construal(ConstrualKind.IRONIC, entry.action_id, expectation_action_id, entry.action_id)


def construe(
    entry: ActionEntry, role: Role | str, prev_context: float, valence: float, kb: ActionKB, cfg: EngineConfig
) -> Construal:
    """Choose how ``role`` performs ``entry`` given the context it carries.

    Precedence is ironic > metaphoric > literal. Irony is only considered
    when enabled in ``cfg``; a broken expectation declaration falls back to
    the non-ironic result.
    """
    role = Role.coerce(role)
    if irony_armed(prev_context, valence, cfg) and entry.irony_expectation is not None:
        try:
            return ironic_enactment(entry, role, entry.irony_expectation, kb)
        except InterpretationError as exc:
            logger.warning("irony skipped for %s/%s: %s", entry.action_id, role.label, exc)
    links = armed_links(entry, prev_context, valence)
    if links:
        target = links[0].target_action_id
        return Construal(ConstrualKind.METAPHORIC, entry.action_id, target, entry.action_id)
    return Construal.literal(entry.action_id)


def weighted_index(weights: Sequence[float], u: float) -> int:
    """Index picked by a uniform variate ``u`` in [0, 1) against ``weights``."""
    total = float(sum(weights))
    if total <= 0:
        raise ValueError("weights must have a positive sum")
    target = u * total
    acc = 0.0
    for i, w in enumerate(weights):
        acc += w
        if target < acc:
            return i
    return len(weights) - 1


def candidates(
    construal: Construal, role: Role | str, kb: ActionKB, arousal: int
) -> list[tuple[GestureSpec, Appropriateness]]:
    """Enactments eligible for the draw, after the arousal filter."""
    role = Role.coerce(role)
    entry = kb[construal.enacted_action_id]
    pool = []
    for e in entry.enactments(role):
        try:
            pool.append((kb.gesture(e.gesture_id), e.appropriateness))
        except KBError:
            logger.warning("%s/%s: skipping unresolved gesture %r", entry.action_id, role.label, e.gesture_id)
    if not pool:
        raise InterpretationError(f"no resolvable {role.label} enactment for {entry.action_id!r}")
    if arousal >= HIGH_AROUSAL:
        sweeping = [c for c in pool if c[0].sweeping]
        if sweeping:
            return sweeping
    return pool


def select_enactment(
    construal: Construal, role: Role | str, kb: ActionKB, arousal: int, rng: random.Random
) -> GestureSpec:
    """Weighted draw (high=3, medium=2, low=1) among the eligible enactments.

    Consumes exactly one variate from ``rng`` regardless of the candidate
    count, so later draws do not shift when a list changes length.
    """
    pool = candidates(construal, role, kb, arousal)
    u = rng.random()
    return pool[weighted_index([a.weight for _, a in pool], u)][0]


# -- interpretation trace ---------------------------------------------------


@dataclass(frozen=True)
class RoleInterpretation:
    character_id: str
    role: Role
    prev_context: float
    valence: float
    context: float
    delta: float
    armed_links: tuple[str, ...]
    construal: Construal
    gesture_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "character_id": self.character_id,
            "role": self.role.label,
            "context": {
                "prev_context": self.prev_context,
                "valence": self.valence,
                "context": self.context,
                "delta": self.delta,
                "armed_links": list(self.armed_links),
            },
            "presentation": {"construal": self.construal.to_dict(), "gesture_id": self.gesture_id},
        }


@dataclass(frozen=True)
class StepInterpretation:
    index: int
    action_id: str
    agent: str
    patient: str
    connective: str
    roles: tuple[RoleInterpretation, RoleInterpretation]

    def role(self, role: Role | str) -> RoleInterpretation:
        role = Role.coerce(role)
        return self.roles[0] if role is Role.AGENT else self.roles[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "reference": {"action_id": self.action_id, "agent": self.agent, "patient": self.patient},
            "connective": self.connective,
            "roles": [r.to_dict() for r in self.roles],
        }


def trace_to_dict(steps: Sequence[StepInterpretation]) -> dict[str, Any]:
    return {"schema_version": 1, "steps": [s.to_dict() for s in steps]}
