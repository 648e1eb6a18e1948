"""Action knowledge base and gesture database.

Both are JSON documents validated against the schemas in ``data/schemas``
and then checked for the semantic invariants a schema cannot express
(ranges, uniqueness, cross references). Loaded objects are immutable.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping

import jsonschema

logger = logging.getLogger(__name__)

SCALE_MIN, SCALE_MAX = -3, 3
AROUSAL_MIN, AROUSAL_MAX = 0, 3
SCALE_NAMES = ("inspiration", "attraction", "support", "respect")
SCHEMA_LABELS = frozenset({"up", "down", "near", "far", "front", "back"})
GESTURE_KINDS = ("iconic", "deictic", "metaphoric", "cohesive", "beat")
NAO_PROFILE = frozenset({"arms", "hands", "pointing_limb", "locomotion"})
_MAPPED_CAPABILITIES = frozenset({"iconic", "deictic", "metaphoric"})


class KBError(ValueError):
    """A knowledge base or gesture database violates its contract."""


class Role(str, Enum):
    AGENT = "A"
    PATIENT = "B"

    @classmethod
    def coerce(cls, value: Role | str) -> Role:
        if isinstance(value, Role):
            return value
        aliases = {"a": cls.AGENT, "agent": cls.AGENT, "b": cls.PATIENT, "patient": cls.PATIENT}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown role {value!r}") from None

    @property
    def label(self) -> str:
        return "agent" if self is Role.AGENT else "patient"


class Level(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


_WEIGHTS = {Level.HIGH: 3, Level.MEDIUM: 2, Level.LOW: 1}


@dataclass(frozen=True)
class Appropriateness:
    level: Level

    @property
    def weight(self) -> int:
        return _WEIGHTS[self.level]

    @classmethod
    def of(cls, level: str | Level) -> Appropriateness:
        return cls(Level(level))


HIGH = Appropriateness(Level.HIGH)
MEDIUM = Appropriateness(Level.MEDIUM)
LOW = Appropriateness(Level.LOW)


@dataclass(frozen=True)
class EmotionVector:
    inspiration: int = 0
    attraction: int = 0
    support: int = 0
    respect: int = 0

    def __post_init__(self) -> None:
        for name in SCALE_NAMES:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise KBError(f"{name} must be an integer, got {v!r}")
            if not SCALE_MIN <= v <= SCALE_MAX:
                raise KBError(f"{name}={v} outside [{SCALE_MIN}, {SCALE_MAX}]")

    def total(self) -> int:
        return self.inspiration + self.attraction + self.support + self.respect

    def to_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in SCALE_NAMES}


class LinkMode(str, Enum):
    SHOCK = "shock"
    REINFORCE = "reinforce"


@dataclass(frozen=True)
class MetaphorLink:
    target_action_id: str
    mode: LinkMode
    threshold: float

    def __post_init__(self) -> None:
        if not self.threshold > 0:
            raise KBError(f"metaphor link to {self.target_action_id!r} needs a positive threshold")

    def to_dict(self) -> dict:
        return {"target_action_id": self.target_action_id, "mode": self.mode.value, "threshold": self.threshold}


@dataclass(frozen=True)
class Enactment:
    gesture_id: str
    appropriateness: Appropriateness

    def to_dict(self) -> dict:
        return {"gesture_id": self.gesture_id, "level": self.appropriateness.level.value}


@dataclass(frozen=True)
class ActionEntry:
    action_id: str
    scales_A: EmotionVector
    scales_B: EmotionVector
    arousal_A: int
    arousal_B: int
    engagement: str
    dialogue_agent: str
    dialogue_patient: str
    enactments_agent: tuple[Enactment, ...]
    enactments_patient: tuple[Enactment, ...]
    metaphor_links: tuple[MetaphorLink, ...] = ()
    # action whose enactment would match the audience's expectation (used by irony)
    irony_expectation: str | None = None

    def __post_init__(self) -> None:
        for name in ("arousal_A", "arousal_B"):
            v = getattr(self, name)
            if not AROUSAL_MIN <= v <= AROUSAL_MAX:
                raise KBError(f"{self.action_id}: {name}={v} outside [{AROUSAL_MIN}, {AROUSAL_MAX}]")
        if self.engagement not in ("engage", "disengage", "neutral"):
            raise KBError(f"{self.action_id}: unknown engagement {self.engagement!r}")
        if not self.enactments_agent or not self.enactments_patient:
            raise KBError(f"{self.action_id}: every role needs at least one enactment")

    def scales(self, role: Role | str) -> EmotionVector:
        return self.scales_A if Role.coerce(role) is Role.AGENT else self.scales_B

    def arousal(self, role: Role | str) -> int:
        return self.arousal_A if Role.coerce(role) is Role.AGENT else self.arousal_B

    def enactments(self, role: Role | str) -> tuple[Enactment, ...]:
        return self.enactments_agent if Role.coerce(role) is Role.AGENT else self.enactments_patient

    def dialogue(self, role: Role | str) -> str:
        return self.dialogue_agent if Role.coerce(role) is Role.AGENT else self.dialogue_patient

    def to_dict(self) -> dict:
        d = {
            "action_id": self.action_id,
            "scales_A": self.scales_A.to_dict(),
            "scales_B": self.scales_B.to_dict(),
            "arousal_A": self.arousal_A,
            "arousal_B": self.arousal_B,
            "engagement": self.engagement,
            "dialogue_agent": self.dialogue_agent,
            "dialogue_patient": self.dialogue_patient,
            "enactments_agent": [e.to_dict() for e in self.enactments_agent],
            "enactments_patient": [e.to_dict() for e in self.enactments_patient],
            "metaphor_links": [m.to_dict() for m in self.metaphor_links],
        }
        if self.irony_expectation is not None:
            d["irony_expectation"] = self.irony_expectation
        return d


@dataclass(frozen=True)
class GestureSpec:
    gesture_id: str
    short_desc: str
    long_desc: str
    duration_s: float
    kind_capabilities: frozenset[str]
    schema_labels: frozenset[str] = frozenset()
    hardware: frozenset[str] = frozenset()
    flags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.duration_s > 0:
            raise KBError(f"gesture {self.gesture_id!r}: duration must be positive, got {self.duration_s}")
        unknown = set(self.schema_labels) - SCHEMA_LABELS
        if unknown:
            raise KBError(f"gesture {self.gesture_id!r}: unknown schema label(s) {sorted(unknown)}")
        if "sweeping" in self.flags and "subtle" in self.flags:
            raise KBError(f"gesture {self.gesture_id!r} cannot be both sweeping and subtle")

    @property
    def sweeping(self) -> bool:
        return "sweeping" in self.flags

    @property
    def subtle(self) -> bool:
        return "subtle" in self.flags

    def to_dict(self) -> dict:
        return {
            "gesture_id": self.gesture_id,
            "short_desc": self.short_desc,
            "long_desc": self.long_desc,
            "duration_s": self.duration_s,
            "kind_capabilities": [k for k in GESTURE_KINDS if k in self.kind_capabilities],
            "schema_labels": sorted(self.schema_labels),
            "hardware": sorted(self.hardware),
            "flags": sorted(self.flags),
        }


@dataclass(frozen=True)
class GestureDB:
    gestures: Mapping[str, GestureSpec]

    def __len__(self) -> int:
        return len(self.gestures)

    def __contains__(self, gesture_id: object) -> bool:
        return gesture_id in self.gestures

    def __getitem__(self, gesture_id: str) -> GestureSpec:
        return self.gestures[gesture_id]

    def ids(self) -> list[str]:
        return list(self.gestures)

    def to_json(self) -> str:
        doc = {"schema_version": 1, "gestures": [g.to_dict() for g in self.gestures.values()]}
        return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class ActionKB:
    actions: Mapping[str, ActionEntry]
    cohesive_pool: tuple[str, ...] = ()
    beat_pool: tuple[str, ...] = ()
    subtle_variants: Mapping[str, str] = field(default_factory=dict)
    gestures: GestureDB | None = None

    def __contains__(self, action_id: object) -> bool:
        return action_id in self.actions

    def __getitem__(self, action_id: str) -> ActionEntry:
        try:
            return self.actions[action_id]
        except KeyError:
            raise KBError(f"unknown action {action_id!r}") from None

    def action_ids(self) -> list[str]:
        return list(self.actions)

    def gesture(self, gesture_id: str) -> GestureSpec:
        if self.gestures is None:
            raise KBError("no gesture database bound to this knowledge base")
        try:
            return self.gestures[gesture_id]
        except KeyError:
            raise KBError(f"unresolved gesture id {gesture_id!r}") from None

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "cohesive_pool": list(self.cohesive_pool),
            "beat_pool": list(self.beat_pool),
            "subtle_variants": dict(self.subtle_variants),
            "actions": [a.to_dict() for a in self.actions.values()],
        }
        return json.dumps(doc, indent=2) + "\n"


# -- loading ----------------------------------------------------------------


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    text = resources.files("robostage.data.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def _parse_document(source: str, schema_name: str) -> dict:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise KBError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(doc, schema(schema_name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise KBError(f"{where}: {exc.message}") from exc
    return doc


def load_gesture_db(source: str) -> GestureDB:
    doc = _parse_document(source, "gesture_db")
    gestures: dict[str, GestureSpec] = {}
    for rec in doc["gestures"]:
        gid = rec["gesture_id"]
        if gid in gestures:
            raise KBError(f"duplicate gesture id {gid!r}")
        gestures[gid] = GestureSpec(
            gesture_id=gid,
            short_desc=rec["short_desc"],
            long_desc=rec["long_desc"],
            duration_s=float(rec["duration_s"]),
            kind_capabilities=frozenset(rec["kind_capabilities"]),
            schema_labels=frozenset(rec["schema_labels"]),
            hardware=frozenset(rec["hardware"]),
            flags=frozenset(rec["flags"]),
        )
    return GestureDB(gestures)


def _vector(d: dict) -> EmotionVector:
    return EmotionVector(**{name: d[name] for name in SCALE_NAMES})


def _enactments(items: list[dict]) -> tuple[Enactment, ...]:
    return tuple(Enactment(e["gesture_id"], Appropriateness.of(e["level"])) for e in items)


def load_action_kb(source: str, gestures: GestureDB | None = None) -> ActionKB:
    """Parse and check an action KB.

    Metaphor targets must resolve to KB actions. When ``gestures`` is given
    every gesture reference (enactments, pools, subtle variants) must resolve
    too. A dangling ``irony_expectation`` is tolerated with a warning since
    irony is an opt-in construal.
    """
    doc = _parse_document(source, "action_kb")
    actions: dict[str, ActionEntry] = {}
    for rec in doc["actions"]:
        aid = rec["action_id"]
        if aid in actions:
            raise KBError(f"duplicate action_id {aid!r}")
        try:
            entry = ActionEntry(
                action_id=aid,
                scales_A=_vector(rec["scales_A"]),
                scales_B=_vector(rec["scales_B"]),
                arousal_A=rec["arousal_A"],
                arousal_B=rec["arousal_B"],
                engagement=rec["engagement"],
                dialogue_agent=rec["dialogue_agent"],
                dialogue_patient=rec["dialogue_patient"],
                enactments_agent=_enactments(rec["enactments_agent"]),
                enactments_patient=_enactments(rec["enactments_patient"]),
                metaphor_links=tuple(
                    MetaphorLink(m["target_action_id"], LinkMode(m["mode"]), float(m["threshold"]))
                    for m in rec.get("metaphor_links", [])
                ),
                irony_expectation=rec.get("irony_expectation"),
            )
        except KBError as exc:
            raise KBError(f"action {aid!r}: {exc}") from exc
        actions[aid] = entry

    for entry in actions.values():
        for link in entry.metaphor_links:
            if link.target_action_id not in actions:
                raise KBError(f"action {entry.action_id!r}: dangling metaphor target {link.target_action_id!r}")
        if entry.irony_expectation is not None and entry.irony_expectation not in actions:
            logger.warning("action %r: irony expectation %r is not in the KB", entry.action_id, entry.irony_expectation)

    kb = ActionKB(
        actions=actions,
        cohesive_pool=tuple(doc.get("cohesive_pool", ())),
        beat_pool=tuple(doc.get("beat_pool", ())),
        subtle_variants=dict(doc.get("subtle_variants", {})),
        gestures=gestures,
    )
    if gestures is not None:
        _check_gesture_refs(kb, gestures)
    return kb


def _check_gesture_refs(kb: ActionKB, db: GestureDB) -> None:
    for entry in kb.actions.values():
        for role in Role:
            for e in entry.enactments(role):
                if e.gesture_id not in db:
                    raise KBError(f"action {entry.action_id!r} ({role.label}): unresolved gesture id {e.gesture_id!r}")
                if not db[e.gesture_id].kind_capabilities & _MAPPED_CAPABILITIES:
                    raise KBError(
                        f"action {entry.action_id!r} ({role.label}): gesture {e.gesture_id!r} "
                        "is neither iconic, deictic nor metaphoric"
                    )
    for pool, kind in ((kb.cohesive_pool, "cohesive"), (kb.beat_pool, "beat")):
        for gid in pool:
            if gid not in db:
                raise KBError(f"{kind} pool: unresolved gesture id {gid!r}")
            if kind not in db[gid].kind_capabilities:
                raise KBError(f"{kind} pool: gesture {gid!r} cannot be performed as {kind}")
    for src, dst in kb.subtle_variants.items():
        for gid in (src, dst):
            if gid not in db:
                raise KBError(f"subtle_variants: unresolved gesture id {gid!r}")
        if not db[dst].subtle:
            raise KBError(f"subtle_variants: {dst!r} is not flagged subtle")


def enactments_for(kb: ActionKB, action_id: str, role: Role | str) -> list[tuple[GestureSpec, Appropriateness]]:
    """Gestures that can enact ``action_id`` in ``role``, in KB order."""
    entry = kb[action_id]
    return [(kb.gesture(e.gesture_id), e.appropriateness) for e in entry.enactments(role)]


def metaphor_target_for(kb: ActionKB, action_id: str, mode: LinkMode | str) -> MetaphorLink | None:
    mode = LinkMode(mode)
    for link in kb[action_id].metaphor_links:
        if link.mode is mode:
            return link
    return None


def hardware_gaps(kb: ActionKB, profile: Iterable[str] = NAO_PROFILE) -> list[str]:
    """(action, role) pairs with no enactment the platform can perform."""
    profile = frozenset(profile)
    gaps = []
    for entry in kb.actions.values():
        for role in Role:
            if not any(kb.gesture(e.gesture_id).hardware <= profile for e in entry.enactments(role)):
                gaps.append(f"{entry.action_id}/{role.label}")
    return gaps


def closure_gaps(kb: ActionKB) -> list[str]:
    """Metaphor targets that lack enactments or are missing altogether."""
    gaps = []
    for entry in kb.actions.values():
        for link in entry.metaphor_links:
            target = kb.actions.get(link.target_action_id)
            if target is None or not target.enactments_agent or not target.enactments_patient:
                gaps.append(f"{entry.action_id}->{link.target_action_id}")
    return gaps


def fixture_path(name: str):
    """Path to one of the bundled fixture files."""
    return resources.files("robostage.fixtures").joinpath(name)


def load_fixture_gestures() -> GestureDB:
    return load_gesture_db(fixture_path("gestures.json").read_text())


def load_fixture_kb() -> ActionKB:
    return load_action_kb(fixture_path("kb.json").read_text(), load_fixture_gestures())
