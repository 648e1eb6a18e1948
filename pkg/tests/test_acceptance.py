"""Acceptance criteria: each test reports one PASS/FAIL line at its tolerance."""

from __future__ import annotations

import dataclasses
import math
import random
import re
import time
from fractions import Fraction

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES, FIXTURE_STORIES, random_script, story

from robostage.choreographer import Mode, diff_timelines, plan_performance, timeline_violations
from robostage.config import EngineConfig
from robostage.executor import run_timeline, seeded_scheduler
from robostage.interpretation import ConstrualKind
from robostage.kb import ActionKB, Role
from robostage.movement import (
    Legality,
    MovementKind,
    Pose,
    Transform,
    apply_transforms,
    can_combine,
    rotate_pose,
    rotation_matrix,
    translate_pose,
)
from robostage.valence import ValenceState, delta, run_valence, update_context


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"AC{number} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# Hand-transcribed combination table, rows and columns in this order.
KINDS = ["spatial", "rotational", "iconic", "deictic", "metaphoric", "cohesive", "beat"]
C, R, X = Legality.COMBINABLE, Legality.RESTRICTED, Legality.EXCLUSIVE
TABLE = [
    [C, C, R, R, R, C, C],
    [C, C, R, R, R, C, C],
    [R, R, C, C, X, C, X],
    [R, R, C, C, C, C, X],
    [R, R, X, C, C, C, X],
    [C, C, C, C, C, C, X],
    [C, C, X, X, X, X, C],
]


def test_ac1_combination_table():
    t0 = time.perf_counter()
    mismatches = [
        (a, b) for i, a in enumerate(KINDS) for j, b in enumerate(KINDS) if can_combine(a, b) is not TABLE[i][j]
    ]
    asymmetric = [(a, b) for a in KINDS for b in KINDS if can_combine(a, b) is not can_combine(b, a)]
    elapsed = time.perf_counter() - t0
    ok = not mismatches and not asymmetric and elapsed < 1.0
    report(1, "combination table", ok, f"49/49 cells, {len(mismatches)} mismatches, "
           f"{len(asymmetric)} asymmetric, {elapsed:.3f}s < 1s")


def test_ac2_recurrence_closed_form():
    rng = random.Random(20240601)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        beta = rng.choice([0.3, 0.5, 0.6, 0.9])
        vs = [rng.uniform(-12, 12) for _ in range(rng.randint(1, 10))]
        state = ValenceState("x")
        for k, v in enumerate(vs, start=1):
            state = update_context(state, v, beta)
            closed = sum(beta * (1 - beta) ** (k - j) * vs[j - 1] for j in range(1, k + 1))
            worst = max(worst, abs(state.context - closed))
    elapsed = time.perf_counter() - t0
    report(2, "recurrence oracle", worst <= 1e-9 and elapsed < 5.0,
           f"max |error| {worst:.2e} <= 1e-9 over 1000 sequences, {elapsed:.2f}s < 5s")


def test_ac3_hand_unroll(kb):
    beta, vs = Fraction(3, 5), [8, 8, -8]
    exact, c = [], Fraction(0)
    for v in vs:
        c = beta * v + (1 - beta) * c
        exact.append(c)
    assert exact == [Fraction(24, 5), Fraction(168, 25), Fraction(-264, 125)]

    state = ValenceState("A")
    contexts = []
    for v in vs:
        state = update_context(state, v, 0.6)
        contexts.append(state.context)
    d3 = delta(state, 3.0).value
    errs = [abs(x - float(e)) for x, e in zip(contexts, exact)] + [abs(d3 - float(exact[2] - exact[1]))]

    # same numbers through the full pipeline
    steps = run_valence(story("unroll"), kb, EngineConfig())
    pipeline = [s.by_character["A"].context for s in steps]
    errs += [abs(x - float(e)) for x, e in zip(pipeline, exact)]
    ok = max(errs) <= 1e-12 and float(exact[2] - exact[1]) == pytest.approx(-8.832, abs=1e-12)
    report(3, "hand unroll", ok, f"contexts {[round(x, 12) for x in contexts]}, delta3 {d3:.12f}, "
           f"max |error| {max(errs):.1e} <= 1e-12")


def test_ac4_scenarios(kb):
    cfg = EngineConfig()
    checks = {}

    t1 = plan_performance(story("scenario1"), kb, cfg)
    step = t1.trace[2]
    patient = step.role(Role.PATIENT)
    slot = t1.slots[2]
    spatial = [e for e in slot.tracks[patient.character_id] if e.kind is MovementKind.SPATIAL]
    checks["a: insult->attack for patient, away step"] = (
        step.action_id == "insult"
        and patient.construal.kind is ConstrualKind.METAPHORIC
        and patient.construal.enacted_action_id == "attack"
        and patient.construal.spoken_action_id == "insult"
        and len(spatial) == 1
        and patient.delta <= -3.0
    )

    t2 = plan_performance(story("scenario2"), kb, cfg)
    agent = t2.trace[2].role(Role.AGENT)
    checks["b: praise->worship for agent, bow"] = (
        t2.trace[2].action_id == "praise"
        and agent.construal.kind is ConstrualKind.METAPHORIC
        and agent.construal.enacted_action_id == "worship"
        and agent.gesture_id == "bow"
    )

    t3 = plan_performance(story("scenario3"), kb, cfg)
    wanted = {"scold": "whip", "command": "enslave", "fire": "release"}
    got = {s.action_id: s.role(Role.PATIENT).construal for s in t3.trace if s.action_id in wanted}
    checks["c: scold/command/fire->whip/enslave/release"] = all(
        got[a].kind is ConstrualKind.METAPHORIC and got[a].enacted_action_id == t for a, t in wanted.items()
    )
    failed = [k for k, v in checks.items() if not v]
    report(4, "scenario reproductions", not failed, "; ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items()))


def test_ac5_transform_properties():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(1000):
        theta = rng.uniform(-4 * math.pi, 4 * math.pi)
        r = rotation_matrix(theta)
        worst = max(worst, abs(np.linalg.det(r) - 1.0))
        worst = max(worst, float(np.abs(r @ rotation_matrix(-theta) - np.eye(3)).max()))
        worst = max(worst, float(np.abs(np.linalg.inv(r) - r.T).max()))
        p = Pose(rng.uniform(-2, 2), rng.uniform(-1.5, 1.5), rng.uniform(0, 2 * math.pi))
        a, b = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        split = translate_pose(translate_pose(p, a), b)
        joint = translate_pose(p, a + b)
        worst = max(worst, abs(split.x - joint.x), abs(split.y - joint.y))
    end = apply_transforms(Pose(0.0, 0.0, 0.0), [Transform.translation(1.0), Transform.rotation(math.pi),
                                                Transform.translation(1.0)])
    fig_err = max(abs(end.x), abs(end.y), abs(end.heading - math.pi))
    assert rotate_pose(Pose(0, 0, 0), math.pi).heading == pytest.approx(math.pi)
    ok = worst <= 1e-9 and fig_err <= 1e-12
    report(5, "transform properties", ok, f"max random-case error {worst:.1e} <= 1e-9; forward/turn/forward ends at "
           f"({end.x:g}, {end.y:g}, {end.heading:.12f}), error {fig_err:.1e} <= 1e-12")


def test_ac6_legality_and_determinism(kb):
    rng = random.Random(606)
    t0 = time.perf_counter()
    violations, unconditioned, nondeterministic = 0, 0, 0
    for i in range(100):
        script = random_script(kb, rng, max_len=12)
        cfg = EngineConfig(rng_seed=i)
        mode = list(Mode)[i % len(Mode)]
        first = plan_performance(script, kb, cfg, mode)
        second = plan_performance(script, kb, cfg, mode)
        violations += len(timeline_violations(first))
        unconditioned += sum(1 for s in first.slots for r in s.restricted_overlaps if not r.condition)
        nondeterministic += first.to_json() != second.to_json() or first != second
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and unconditioned == 0 and nondeterministic == 0 and elapsed < 30
    report(6, "timeline legality and determinism", ok, f"100 random scripts over all modes: {violations} illegal overlaps, "
           f"{unconditioned} unconditioned restricted, {nondeterministic} non-identical re-runs, {elapsed:.1f}s < 30s")


_SPATIAL_VALUE = re.compile(r"slots\[(\d+)\]\.tracks\.(\w+)\[(\d+)\]\.transform\.value")


def _flip_only(coherent, flipped) -> tuple[bool, int]:
    diffs = diff_timelines(coherent, flipped)
    seen = set()
    for d in diffs:
        m = _SPATIAL_VALUE.fullmatch(d.path)
        if not m:
            return False, len(seen)
        s, actor, j = int(m[1]), m[2], int(m[3])
        event = coherent.slots[s].tracks[actor][j]
        if event.kind is not MovementKind.SPATIAL or d.after != -d.before:
            return False, len(seen)
        seen.add((s, actor, j))
    expected = {
        (s.index, a, j) for s in coherent.slots for a, evs in s.tracks.items() for j, e in enumerate(evs)
        if e.kind is MovementKind.SPATIAL
    }
    return seen == expected, len(seen)


def test_ac7_coherence_flip(kb):
    rng = random.Random(707)
    scripts = [story(n) for n in FIXTURE_STORIES] + [random_script(kb, rng) for _ in range(50)]
    bad, flipped_total = 0, 0
    for i, script in enumerate(scripts):
        cfg = EngineConfig(rng_seed=i)
        ok, n = _flip_only(plan_performance(script, kb, cfg), plan_performance(script, kb, cfg, Mode.INCOHERENT_SPATIAL))
        bad += not ok
        flipped_total += n
    report(7, "coherence flip", bad == 0 and flipped_total > 0,
           f"{len(scripts)} scripts, {flipped_total} spatial events sign-flipped, {bad} with any other difference")


def test_ac8_executor(kb):
    rng = random.Random(808)
    barrier_bad, schedule_bad, pose_bad = 0, 0, 0
    for i in range(50):
        timeline = plan_performance(random_script(kb, rng), kb, EngineConfig(rng_seed=i))
        traces = [run_timeline(timeline, kb.gestures, seeded_scheduler(k)) for k in range(10)]
        reference = traces[0]
        schedule_bad += any(t.posts != reference.posts for t in traces)
        ticks = {}
        for p in reference.posts:
            lo, hi = ticks.get(p.slot, (p.tick, p.tick))
            ticks[p.slot] = (min(lo, p.tick), max(hi, p.tick))
        barrier_bad += any(ticks[s][1] >= ticks[s + 1][0] for s in range(len(timeline.slots) - 1))
        pose_bad += any(t.final_stage.poses != timeline.final_stage.poses for t in traces)
    ok = barrier_bad == 0 and schedule_bad == 0 and pose_bad == 0
    report(8, "executor", ok, f"50 timelines x 10 schedules: {barrier_bad} barrier breaches, "
           f"{schedule_bad} schedule-dependent traces, {pose_bad} pose mismatches (exact)")


def _zero_arousal(kb: ActionKB) -> ActionKB:
    actions = {k: dataclasses.replace(a, arousal_A=0, arousal_B=0) for k, a in kb.actions.items()}
    return dataclasses.replace(kb, actions=actions)


def test_ac9_arousal_isolation(kb):
    flat = _zero_arousal(kb)
    valence_changed = 0
    selection_changed = []
    for name in FIXTURE_STORIES:
        script = story(name)
        cfg = EngineConfig()
        for a, b in zip(run_valence(script, kb, cfg), run_valence(script, flat, cfg)):
            for cid in a.by_character:
                x, y = a.by_character[cid], b.by_character[cid]
                valence_changed += (x.context, x.delta, x.connective) != (y.context, y.delta, y.connective)
            valence_changed += a.connective != b.connective
        for seed in range(10):
            cfg = EngineConfig(rng_seed=seed)
            before = plan_performance(script, kb, cfg).trace
            after = plan_performance(script, flat, cfg).trace
            for s1, s2 in zip(before, after):
                for r1, r2 in zip(s1.roles, s2.roles):
                    if r1.gesture_id != r2.gesture_id:
                        selection_changed.append((name, seed, s1.index, r1.gesture_id, r2.gesture_id))
    has_sweeping = any(kb.gesture(selection[3]).sweeping for selection in selection_changed)
    ok = valence_changed == 0 and bool(selection_changed) and has_sweeping
    example = selection_changed[0] if selection_changed else None
    report(9, "arousal isolation", ok, f"{valence_changed} context/delta/connective changes; "
           f"{len(selection_changed)} gesture selections changed (e.g. {example})")
