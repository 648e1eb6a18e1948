"""Compile an interpreted script into a legality-checked performance timeline.

Slot layout (seconds from slot start):

* the agent's mapped gesture starts at 0;
* the patient's reaction starts at the midpoint of the agent's gesture;
* a cohesive gesture, when the slot references a recurring motif, runs on
  the agent's track from 0 alongside the mapped gesture;
* body movements (turn, then step) and any beat start once both mapped
  gestures have finished.

Spatial guards (minimum distance, stage edge) are evaluated on the
coherent trajectory and on its sign-flipped mirror at once, so a coherent
plan and its incoherent-spatial counterpart make identical choices except
for the step signs.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Mapping, Sequence

import jsonschema

from .config import INITIAL_SEPARATION, REACH_MARGIN, STAGE_DEPTH, STAGE_WIDTH, EngineConfig
from .interpretation import (
    Construal,
    ConstrualKind,
    RoleInterpretation,
    StepInterpretation,
    armed_links,
    candidates,
    construe,
    select_enactment,
)
from .kb import ActionEntry, ActionKB, Appropriateness, GestureSpec, KBError, Role, schema
from .movement import (
    TARGET_STILL_VISIBLE,
    WALK_SAFE,
    Bounds,
    Legality,
    MovementKind,
    Pose,
    Transform,
    bearing,
    can_combine,
    distance,
    heading_vector,
    restriction_condition,
    signed_angle,
)
from .script import Script
from .valence import Connective, Delta, Direction, run_valence

logger = logging.getLogger(__name__)

TIMELINE_SCHEMA_VERSION = 1
WALK_SPEED = 0.125  # m/s
TURN_SPEED = math.pi / 2  # rad/s
MIN_BODY_DURATION = 0.1
ANGLE_EPS = 1e-9
STAGE_BOUNDS = Bounds(-STAGE_WIDTH / 2, STAGE_WIDTH / 2, -STAGE_DEPTH / 2, STAGE_DEPTH / 2)
MAPPED_KINDS = (MovementKind.ICONIC, MovementKind.DEICTIC, MovementKind.METAPHORIC)


class PlanningError(RuntimeError):
    """The planner produced or was asked to produce an illegal timeline."""


class Mode(str, Enum):
    COHERENT = "coherent"
    INCOHERENT_SPATIAL = "incoherent_spatial"
    INCOHERENT_GESTURE = "incoherent_gesture"


class Justification(str, Enum):
    MAPPING = "mapping"
    DELTA_STEP = "delta_step"
    ENGAGEMENT_TURN = "engagement_turn"
    COHESIVE = "cohesive"
    BEAT = "beat"
    INCOHERENT_BASELINE = "incoherent_baseline"


@dataclass(frozen=True)
class MovementEvent:
    kind: MovementKind
    onset_s: float
    duration_s: float
    justification: Justification
    gesture_id: str | None = None
    transform: Transform | None = None

    def __post_init__(self) -> None:
        if not self.duration_s > 0:
            raise PlanningError(f"event duration must be positive, got {self.duration_s}")
        if self.kind.is_gesture and (self.gesture_id is None or self.transform is not None):
            raise PlanningError(f"{self.kind.value} event needs a gesture id and no transform")
        if self.kind.is_body and (self.transform is None or self.gesture_id is not None):
            raise PlanningError(f"{self.kind.value} event needs a transform and no gesture id")

    @property
    def end_s(self) -> float:
        return self.onset_s + self.duration_s

    def overlaps(self, other: MovementEvent) -> bool:
        return self.onset_s < other.end_s and other.onset_s < self.end_s

    def label(self) -> str:
        if self.gesture_id is not None:
            return self.gesture_id
        return f"{self.transform.variant}({self.transform.value:+.6g})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "gesture_id": self.gesture_id,
            "transform": self.transform.to_dict() if self.transform else None,
            "onset_s": self.onset_s,
            "duration_s": self.duration_s,
            "justification": self.justification.value,
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> MovementEvent:
        return cls(
            kind=MovementKind(d["kind"]),
            onset_s=float(d["onset_s"]),
            duration_s=float(d["duration_s"]),
            justification=Justification(d["justification"]),
            gesture_id=d.get("gesture_id"),
            transform=Transform.from_dict(d["transform"]) if d.get("transform") else None,
        )


@dataclass(frozen=True)
class RestrictedOverlap:
    actor: str
    first: int
    second: int
    condition: str

    def to_dict(self) -> dict[str, Any]:
        return {"actor": self.actor, "first": self.first, "second": self.second, "condition": self.condition}


@dataclass(frozen=True)
class Slot:
    index: int
    action_id: str
    connective: str
    narration: str
    tracks: Mapping[str, tuple[MovementEvent, ...]]
    construals: Mapping[str, Construal]
    restricted_overlaps: tuple[RestrictedOverlap, ...] = ()

    @property
    def duration_s(self) -> float:
        return max((e.end_s for track in self.tracks.values() for e in track), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "action_id": self.action_id,
            "connective": self.connective,
            "narration": self.narration,
            "duration_s": self.duration_s,
            "construals": {a: c.to_dict() for a, c in self.construals.items()},
            "tracks": {a: [e.to_dict() for e in events] for a, events in self.tracks.items()},
            "restricted_overlaps": [r.to_dict() for r in self.restricted_overlaps],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Slot:
        return cls(
            index=int(d["index"]),
            action_id=d["action_id"],
            connective=d["connective"],
            narration=d["narration"],
            tracks={a: tuple(MovementEvent.from_dict(e) for e in evs) for a, evs in d["tracks"].items()},
            construals={a: Construal.from_dict(c) for a, c in d["construals"].items()},
            restricted_overlaps=tuple(RestrictedOverlap(**r) for r in d.get("restricted_overlaps", [])),
        )


@dataclass(frozen=True)
class StageState:
    poses: Mapping[str, Pose]

    @property
    def actors(self) -> tuple[str, ...]:
        return tuple(self.poses)

    @property
    def distance(self) -> float:
        a, b = self.actors[:2]
        return distance(self.poses[a], self.poses[b])

    def partner(self, actor: str) -> str:
        return next(a for a in self.poses if a != actor)

    def with_pose(self, actor: str, pose: Pose) -> StageState:
        poses = dict(self.poses)
        poses[actor] = pose
        return StageState(poses)

    def apply(self, actor: str, transform: Transform) -> StageState:
        return self.with_pose(actor, transform.apply(self.poses[actor]))

    def to_dict(self) -> dict[str, Any]:
        return {a: p.to_dict() for a, p in self.poses.items()}


@dataclass(frozen=True)
class Timeline:
    slots: tuple[Slot, ...]
    initial_poses: Mapping[str, Pose]
    config_snapshot: EngineConfig
    mode: Mode
    actor_names: Mapping[str, str]
    final_stage: StageState
    trace: tuple[StepInterpretation, ...] = field(default=(), compare=False)

    @property
    def actors(self) -> tuple[str, ...]:
        return tuple(self.initial_poses)

    def event_count(self) -> int:
        return sum(len(t) for s in self.slots for t in s.tracks.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": TIMELINE_SCHEMA_VERSION,
            "mode": self.mode.value,
            "actors": [{"id": a, "display_name": self.actor_names[a]} for a in self.actors],
            "config": self.config_snapshot.to_dict(),
            "initial_poses": {a: p.to_dict() for a, p in self.initial_poses.items()},
            "final_poses": self.final_stage.to_dict(),
            "slots": [s.to_dict() for s in self.slots],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Timeline:
        if d.get("schema_version") != TIMELINE_SCHEMA_VERSION:
            raise ValueError(f"unsupported timeline schema version {d.get('schema_version')!r}")
        try:
            jsonschema.validate(d, schema("timeline"))
        except jsonschema.ValidationError as exc:
            raise ValueError(f"timeline: {exc.message}") from None
        initial = {a: Pose.from_dict(p) for a, p in d["initial_poses"].items()}
        return cls(
            slots=tuple(Slot.from_dict(s) for s in d["slots"]),
            initial_poses=initial,
            config_snapshot=EngineConfig.from_dict(d["config"]),
            mode=Mode(d["mode"]),
            actor_names={a["id"]: a["display_name"] for a in d["actors"]},
            final_stage=StageState({a: Pose.from_dict(p) for a, p in d["final_poses"].items()}),
        )

    @classmethod
    def from_json(cls, text: str) -> Timeline:
        return cls.from_dict(json.loads(text))


def initial_stage(actors: Sequence[str]) -> StageState:
    """Two actors on the x axis, ``INITIAL_SEPARATION`` apart, facing each other."""
    a, b = actors
    half = INITIAL_SEPARATION / 2
    return StageState({a: Pose(-half, 0.0, 0.0), b: Pose(half, 0.0, math.pi)})


# -- spatial and rotational decisions -------------------------------------


def _alignment(stage: StageState, actor: str) -> float:
    """+1 when ``actor`` faces its partner, -1 when facing directly away."""
    pose = stage.poses[actor]
    to_partner = bearing(pose, stage.poses[stage.partner(actor)])
    return 1.0 if math.cos(pose.heading - to_partner) >= 0 else -1.0


def _radial_step(stage: StageState, actor: str, radial: float) -> Transform:
    """Heading-frame translation that moves ``actor`` ``radial`` metres toward its partner."""
    return Transform.translation(radial * _alignment(stage, actor))


def _step_violation(stage: StageState, actor: str, radial: float, cfg: EngineConfig) -> str | None:
    after = stage.apply(actor, _radial_step(stage, actor, radial))
    pose = after.poses[actor]
    if after.distance < cfg.min_distance:
        return f"would bring actors within {cfg.min_distance} m"
    if not STAGE_BOUNDS.contains(pose.x, pose.y):
        return "would leave the stage"
    return None


def spatial_decision(
    delta: Delta, cfg: EngineConfig, stage: StageState | None = None, actor: str | None = None
) -> Transform | None:
    """Step toward or away from the partner for a significant context change.

    Without a stage the returned translation is radial (positive = toward).
    With one it is expressed along ``actor``'s heading, and a step that would
    break the minimum distance or leave the stage is suppressed.
    """
    if delta.direction is Direction.NONE:
        return None
    radial = cfg.step_size if delta.direction is Direction.TOWARD else -cfg.step_size
    if stage is None:
        return Transform.translation(radial)
    problem = _step_violation(stage, actor, radial, cfg)
    if problem:
        logger.warning("step for %s suppressed: %s", actor, problem)
        return None
    return _radial_step(stage, actor, radial)


def rotation_decision(entry: ActionEntry, role: Role | str, stage: StageState, actor: str) -> Transform | None:
    """Turn the agent to face (engage) or face away from (disengage) its partner."""
    if Role.coerce(role) is not Role.AGENT or entry.engagement == "neutral":
        return None
    pose = stage.poses[actor]
    target = bearing(pose, stage.poses[stage.partner(actor)])
    if entry.engagement == "disengage":
        target += math.pi
    theta = signed_angle(target - pose.heading)
    if abs(theta) < ANGLE_EPS:
        return None
    return Transform.rotation(theta)


def proximity_guard(
    gesture: GestureSpec,
    stage: StageState,
    cfg: EngineConfig,
    kb: ActionKB | None = None,
    alternatives: Sequence[tuple[GestureSpec, Appropriateness]] = (),
) -> GestureSpec:
    """Swap a sweeping gesture for a safe one when the actors stand close.

    Prefers the KB's designated subtle variant, then the best-ranked
    non-sweeping alternative; keeps the gesture when neither exists.
    """
    if not gesture.sweeping or stage.distance >= cfg.min_distance + REACH_MARGIN:
        return gesture
    if kb is not None:
        variant = kb.subtle_variants.get(gesture.gesture_id)
        if variant is not None:
            return kb.gesture(variant)
    ranked = sorted((g for g in alternatives if not g[0].sweeping), key=lambda g: -g[1].weight)
    if ranked:
        return ranked[0][0]
    logger.warning("no safe substitute for sweeping gesture %r at %.2f m", gesture.gesture_id, stage.distance)
    return gesture


# -- cohesives and beats ----------------------------------------------------


def schedule_cohesives(script: Script, kb: ActionKB) -> dict[int, tuple[str, str]]:
    """Cohesive gesture per slot: ``{slot: (performer, gesture_id)}``.

    A motif is a character referenced by a slot's narration without acting
    in it, i.e. the patient; the agent who names them performs the
    cohesive. Motifs that recur are bound to one pool gesture at first
    occurrence (pool order, round robin) and keep it for the whole
    performance. One-off references get nothing.
    """
    occurrences: dict[str, list[int]] = {}
    for a in script.actions:
        occurrences.setdefault(a.patient.id, []).append(a.index)
    recurring = [m for m, slots in occurrences.items() if len(slots) >= 2]
    if not recurring:
        return {}
    if not kb.cohesive_pool:
        raise PlanningError("script has recurring motifs but the KB declares no cohesive pool")
    binding = {m: kb.cohesive_pool[i % len(kb.cohesive_pool)] for i, m in enumerate(recurring)}
    schedule = {}
    for a in script.actions:
        if a.patient.id in binding:
            schedule[a.index] = (a.agent.id, binding[a.patient.id])
    return schedule


def drop_conflicting_beats(events: Sequence[MovementEvent]) -> list[MovementEvent]:
    """Remove beats that overlap a cohesive (global outranks local)."""
    cohesives = [e for e in events if e.kind is MovementKind.COHESIVE]
    kept = []
    for e in events:
        if e.kind is MovementKind.BEAT and any(e.overlaps(c) for c in cohesives):
            logger.debug("beat %s dropped: overlaps a cohesive", e.gesture_id)
            continue
        kept.append(e)
    return kept


# -- legality ---------------------------------------------------------------


def _condition_holds(condition: str, gesture: GestureSpec | None, stage: StageState | None, actor: str) -> bool:
    if condition == WALK_SAFE:
        return gesture is not None and "walk_safe" in gesture.flags
    if condition == TARGET_STILL_VISIBLE:
        return stage is not None and _alignment(stage, actor) > 0
    return False


def check_track(
    actor: str,
    events: Sequence[MovementEvent],
    gestures: Mapping[str, GestureSpec] | None = None,
    stage: StageState | None = None,
) -> tuple[list[str], list[RestrictedOverlap]]:
    """Pairwise legality of overlapping events on one track.

    Returns (violations, licensed restricted overlaps).
    """
    violations = []
    licensed = []
    for (i, a), (j, b) in combinations(enumerate(events), 2):
        if not a.overlaps(b):
            continue
        legality = can_combine(a.kind, b.kind)
        if legality is Legality.EXCLUSIVE:
            violations.append(f"{actor}: {a.kind.value} #{i} and {b.kind.value} #{j} overlap but are exclusive")
        elif legality is Legality.RESTRICTED:
            body, gest = (a, b) if a.kind.is_body else (b, a)
            condition = restriction_condition(body.kind, gest.kind)
            spec = gestures.get(gest.gesture_id) if gestures else None
            if condition and _condition_holds(condition, spec, stage, actor):
                licensed.append(RestrictedOverlap(actor, i, j, condition))
            else:
                violations.append(f"{actor}: restricted overlap #{i}/#{j} without a satisfied condition")
    return violations, licensed


def timeline_violations(timeline: Timeline) -> list[str]:
    """Exclusive overlaps and unlicensed restricted overlaps in a timeline."""
    problems = []
    for slot in timeline.slots:
        recorded = {(r.actor, r.first, r.second) for r in slot.restricted_overlaps}
        for actor, events in slot.tracks.items():
            for (i, a), (j, b) in combinations(enumerate(events), 2):
                if not a.overlaps(b):
                    continue
                legality = can_combine(a.kind, b.kind)
                if legality is Legality.EXCLUSIVE:
                    problems.append(f"slot {slot.index} {actor}: exclusive {a.kind.value}/{b.kind.value}")
                elif legality is Legality.RESTRICTED and (actor, i, j) not in recorded:
                    problems.append(f"slot {slot.index} {actor}: unconditioned restricted {a.kind.value}/{b.kind.value}")
    return problems


# -- planning ---------------------------------------------------------------


def gesture_kind(gesture: GestureSpec, construal_kind: ConstrualKind) -> MovementKind:
    """Movement kind a mapped gesture is performed as, given the construal."""
    if construal_kind is ConstrualKind.LITERAL:
        order = (MovementKind.ICONIC, MovementKind.DEICTIC, MovementKind.METAPHORIC)
    else:
        order = (MovementKind.METAPHORIC, MovementKind.ICONIC, MovementKind.DEICTIC)
    for kind in order:
        if kind.value in gesture.kind_capabilities:
            return kind
    raise PlanningError(f"gesture {gesture.gesture_id!r} cannot be performed as a mapped gesture")


def random_gesture(kb: ActionKB, rng: random.Random) -> GestureSpec:
    """Uniform draw over every DB gesture usable as a mapped gesture."""
    pool = [g for g in kb.gestures.gestures.values() if any(k.value in g.kind_capabilities for k in MAPPED_KINDS)]
    u = rng.random()
    return pool[min(int(u * len(pool)), len(pool) - 1)]


def _body_duration(transform: Transform) -> float:
    speed = WALK_SPEED if transform.variant == "translation" else TURN_SPEED
    return max(MIN_BODY_DURATION, abs(transform.value) / speed)


def _narration(index: int, connective: Connective, agent: str, patient: str, entry: ActionEntry) -> str:
    lead = "" if index == 0 else f"{connective.value.capitalize()}, "
    return f'{lead}{agent}: "{entry.dialogue_agent}" {patient}: "{entry.dialogue_patient}"'


def plan_performance(script: Script, kb: ActionKB, cfg: EngineConfig, mode: Mode | str = Mode.COHERENT) -> Timeline:
    """Interpret ``script`` and lay every slot out as a per-actor event timeline.

    Deterministic in (script, kb, cfg, mode). The seeded stream is consumed
    once per role per slot, agent first.
    """
    mode = Mode(mode)
    if kb.gestures is None:
        raise KBError("planning needs a gesture database bound to the KB")
    actors = tuple(c.id for c in script.characters)
    names = {c.id: c.display_name for c in script.characters}
    start = initial_stage(actors)
    coherent, mirrored = start, start
    rng = random.Random(cfg.rng_seed)
    cohesives = schedule_cohesives(script, kb)
    flip = -1.0 if mode is Mode.INCOHERENT_SPATIAL else 1.0

    slots = []
    trace = []
    for action, step in zip(script.actions, run_valence(script, kb, cfg)):
        entry = kb[action.action_id]
        closer = coherent if coherent.distance <= mirrored.distance else mirrored
        roles = ((action.agent.id, Role.AGENT), (action.patient.id, Role.PATIENT))

        mapped: dict[str, MovementEvent] = {}
        construals: dict[str, Construal] = {}
        interp = []
        for actor, role in roles:
            cs = step.by_character[actor]
            construal = construe(entry, role, cs.prev_context, cs.valence, kb, cfg)
            arousal = kb[construal.enacted_action_id].arousal(role)
            if mode is Mode.INCOHERENT_GESTURE:
                gesture = random_gesture(kb, rng)
                alternatives: Sequence[tuple[GestureSpec, Appropriateness]] = ()
                why = Justification.INCOHERENT_BASELINE
            else:
                alternatives = candidates(construal, role, kb, arousal)
                gesture = select_enactment(construal, role, kb, arousal, rng)
                why = Justification.MAPPING
            gesture = proximity_guard(gesture, closer, cfg, kb, alternatives)
            onset = 0.0 if role is Role.AGENT else mapped[action.agent.id].duration_s / 2
            mapped[actor] = MovementEvent(
                gesture_kind(gesture, construal.kind), onset, gesture.duration_s, why, gesture_id=gesture.gesture_id
            )
            construals[actor] = construal
            interp.append(
                RoleInterpretation(
                    character_id=actor,
                    role=role,
                    prev_context=cs.prev_context,
                    valence=cs.valence,
                    context=cs.context,
                    delta=cs.delta.value,
                    armed_links=tuple(l.target_action_id for l in armed_links(entry, cs.prev_context, cs.valence)),
                    construal=construal,
                    gesture_id=gesture.gesture_id,
                )
            )

        body_start = max(e.end_s for e in mapped.values())
        tracks: dict[str, list[MovementEvent]] = {a: [mapped[a]] for a in actors}
        agent = action.agent.id

        if action.index in cohesives:
            performer, gid = cohesives[action.index]
            tracks[performer].append(
                MovementEvent(MovementKind.COHESIVE, 0.0, kb.gesture(gid).duration_s, Justification.COHESIVE, gesture_id=gid)
            )
        if step.connective is Connective.THEN and kb.beat_pool:
            gid = kb.beat_pool[action.index % len(kb.beat_pool)]
            beat = MovementEvent(MovementKind.BEAT, body_start, kb.gesture(gid).duration_s, Justification.BEAT, gesture_id=gid)
            tracks[agent] = drop_conflicting_beats(tracks[agent] + [beat])

        # turns first, judged on the slot-start stage
        body_cursor = {a: body_start for a in actors}
        for actor, role in roles:
            turn = rotation_decision(entry, role, coherent, actor)
            if turn is None:
                continue
            tracks[actor].append(
                MovementEvent(
                    MovementKind.ROTATIONAL, body_cursor[actor], _body_duration(turn), Justification.ENGAGEMENT_TURN,
                    transform=turn,
                )
            )
            body_cursor[actor] += _body_duration(turn)
            coherent = coherent.apply(actor, turn)
            mirrored = mirrored.apply(actor, turn)

        for actor, _ in roles:
            d = step.by_character[actor].delta
            if d.direction is Direction.NONE:
                continue
            radial = cfg.step_size if d.direction is Direction.TOWARD else -cfg.step_size
            problem = _step_violation(coherent, actor, radial, cfg) or _step_violation(mirrored, actor, -radial, cfg)
            if problem:
                logger.warning("slot %d: step for %s suppressed: %s", action.index, actor, problem)
                continue
            step_c = _radial_step(coherent, actor, radial)
            step_m = _radial_step(mirrored, actor, -radial)
            coherent = coherent.apply(actor, step_c)
            mirrored = mirrored.apply(actor, step_m)
            emitted = step_c if flip > 0 else step_m
            tracks[actor].append(
                MovementEvent(
                    MovementKind.SPATIAL, body_cursor[actor], _body_duration(emitted), Justification.DELTA_STEP,
                    transform=emitted,
                )
            )
            body_cursor[actor] += _body_duration(emitted)

        actual = coherent if flip > 0 else mirrored
        restricted = []
        for actor in actors:
            events = sorted(tracks[actor], key=lambda e: e.onset_s)
            tracks[actor] = events
            violations, licensed = check_track(actor, events, kb.gestures.gestures, actual)
            if violations:
                raise PlanningError(f"slot {action.index}: " + "; ".join(violations))
            restricted.extend(licensed)

        slots.append(
            Slot(
                index=action.index,
                action_id=action.action_id,
                connective=step.connective.value,
                narration=_narration(action.index, step.connective, action.agent.display_name,
                                     action.patient.display_name, entry),
                tracks={a: tuple(tracks[a]) for a in actors},
                construals={a: construals[a] for a in actors},
                restricted_overlaps=tuple(restricted),
            )
        )
        trace.append(
            StepInterpretation(
                index=action.index,
                action_id=action.action_id,
                agent=agent,
                patient=action.patient.id,
                connective=step.connective.value,
                roles=(interp[0], interp[1]),
            )
        )

    return Timeline(
        slots=tuple(slots),
        initial_poses=dict(start.poses),
        config_snapshot=cfg,
        mode=mode,
        actor_names=names,
        final_stage=coherent if flip > 0 else mirrored,
        trace=tuple(trace),
    )


def replay_stage(timeline: Timeline) -> StageState:
    """Apply every body transform, in track order, to the initial poses."""
    stage = StageState(dict(timeline.initial_poses))
    for slot in timeline.slots:
        for actor, events in slot.tracks.items():
            for e in events:
                if e.transform is not None:
                    stage = stage.apply(actor, e.transform)
    return stage


def radial_component(stage: StageState, actor: str, transform: Transform) -> float:
    """Signed change of inter-actor distance caused by a translation (positive = apart)."""
    pose = stage.poses[actor]
    c, s = heading_vector(pose.heading)
    partner = stage.poses[stage.partner(actor)]
    ux, uy = partner.x - pose.x, partner.y - pose.y
    norm = math.hypot(ux, uy)
    return -transform.value * (c * ux + s * uy) / norm


@dataclass(frozen=True)
class FieldDiff:
    path: str
    before: Any
    after: Any

    def __str__(self) -> str:
        return f"{self.path}: {self.before!r} -> {self.after!r}"


def _walk_diff(a: Any, b: Any, path: str, out: list[FieldDiff]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b), key=str):
            _walk_diff(a.get(key), b.get(key), f"{path}.{key}" if path else str(key), out)
    elif isinstance(a, list) and isinstance(b, list):
        for i in range(max(len(a), len(b))):
            _walk_diff(a[i] if i < len(a) else None, b[i] if i < len(b) else None, f"{path}[{i}]", out)
    elif a != b:
        out.append(FieldDiff(path, a, b))


def diff_timelines(a: Timeline, b: Timeline) -> list[FieldDiff]:
    """Field-level differences between the slots of two timelines."""
    out: list[FieldDiff] = []
    _walk_diff([s.to_dict() for s in a.slots], [s.to_dict() for s in b.slots], "slots", out)
    return out
