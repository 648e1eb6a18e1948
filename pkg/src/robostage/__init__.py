"""Interpretation-driven choreography for a troupe of two robot actors.

A plot script names actions between two characters. Each character's
emotional context decides how it construes the action, which gesture
enacts it, and whether it steps toward or away from its partner. The
resulting timeline can be replayed by a blackboard executor.
"""

from __future__ import annotations

from .choreographer import (
    Mode,
    MovementEvent,
    PlanningError,
    Slot,
    StageState,
    Timeline,
    diff_timelines,
    plan_performance,
    proximity_guard,
    rotation_decision,
    schedule_cohesives,
    spatial_decision,
)
from .config import EngineConfig
from .executor import Blackboard, ExecutionTrace, post, run_timeline
from .interpretation import Construal, ConstrualKind, construe, ironic_enactment, select_enactment
from .kb import (
    ActionEntry,
    ActionKB,
    GestureDB,
    GestureSpec,
    KBError,
    Role,
    enactments_for,
    load_action_kb,
    load_fixture_kb,
    load_gesture_db,
    metaphor_target_for,
)
from .movement import (
    Legality,
    MovementKind,
    Pose,
    Transform,
    can_combine,
    properties_of,
    rotate_pose,
    translate_pose,
    validate_parallel_set,
)
from .script import Script, ScriptError, parse_script, validate_script
from .valence import arousal_level, classify_connective, delta, role_valence, run_valence, update_context

__all__ = [
    "ActionEntry",
    "ActionKB",
    "Blackboard",
    "Construal",
    "ConstrualKind",
    "EngineConfig",
    "ExecutionTrace",
    "GestureDB",
    "GestureSpec",
    "KBError",
    "Legality",
    "Mode",
    "MovementEvent",
    "MovementKind",
    "PlanningError",
    "Pose",
    "Role",
    "Script",
    "ScriptError",
    "Slot",
    "StageState",
    "Timeline",
    "Transform",
    "arousal_level",
    "can_combine",
    "classify_connective",
    "construe",
    "delta",
    "diff_timelines",
    "enactments_for",
    "ironic_enactment",
    "load_action_kb",
    "load_fixture_kb",
    "load_gesture_db",
    "metaphor_target_for",
    "parse_script",
    "plan_performance",
    "post",
    "properties_of",
    "proximity_guard",
    "role_valence",
    "rotate_pose",
    "rotation_decision",
    "run_timeline",
    "run_valence",
    "schedule_cohesives",
    "select_enactment",
    "spatial_decision",
    "translate_pose",
    "update_context",
    "validate_parallel_set",
    "validate_script",
]
