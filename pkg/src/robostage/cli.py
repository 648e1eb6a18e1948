"""Command-line entry point: ``robostage <subcommand> ...``.

Exit codes: 0 success, 1 diagnostics (bad script, KB or timeline content),
2 usage error (bad flags, unreadable paths, invalid configuration).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from .choreographer import Mode, PlanningError, Timeline, diff_timelines, plan_performance
from .config import ConfigError, EngineConfig
from .executor import ExecutorError, run_timeline
from .interpretation import InterpretationError, trace_to_dict
from .kb import ActionKB, KBError, closure_gaps, fixture_path, hardware_gaps, load_action_kb, load_gesture_db
from .script import Script, ScriptError, parse_script, validate_script
from .valence import run_valence

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_USAGE = 0, 1, 2

TRACE_COLUMNS = (
    "slot",
    "action_id",
    "character",
    "role",
    "valence",
    "prev_context",
    "context",
    "delta",
    "significant",
    "direction",
    "connective",
    "step_connective",
)


class UsageError(Exception):
    pass


class Diagnostics(Exception):
    pass


def _read(path: str | None, what: str) -> str:
    if path is None:
        raise UsageError(f"missing {what} path")
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {path}")
    return p.read_text(encoding="utf-8")


def _write(path: str | None, text: str, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _config(args: argparse.Namespace) -> EngineConfig:
    try:
        cfg = EngineConfig.from_json(_read(args.config, "config")) if args.config else EngineConfig()
        return cfg.with_overrides(decay_weight=args.beta, step_threshold=args.tau, rng_seed=args.seed)
    except (ConfigError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _kb(args: argparse.Namespace) -> ActionKB:
    kb_text = _read(args.kb, "knowledge base")
    gestures_text = _read(args.gestures, "gesture database") if args.gestures else fixture_path("gestures.json").read_text()
    try:
        return load_action_kb(kb_text, load_gesture_db(gestures_text))
    except KBError as exc:
        raise Diagnostics(f"knowledge base: {exc}") from None


def _script(path: str) -> Script:
    source = Path(path).read_bytes() if Path(path).is_file() else None
    if source is None:
        raise UsageError(f"script not found: {path}")
    try:
        return parse_script(source)
    except ScriptError as exc:
        raise Diagnostics(f"{path}:{exc}") from None


def _checked_script(args: argparse.Namespace, kb: ActionKB, cfg: EngineConfig, stderr) -> Script:
    script = _script(args.script)
    diags = validate_script(script, kb, cfg)
    for d in diags:
        print(f"{args.script}:{d}", file=stderr)
    if any(d.severity == "error" for d in diags):
        raise Diagnostics(f"{args.script}: script has errors")
    return script


def _plan(args: argparse.Namespace, mode: Mode, stderr) -> tuple[Timeline, ActionKB]:
    cfg = _config(args)
    kb = _kb(args)
    script = _checked_script(args, kb, cfg, stderr)
    try:
        return plan_performance(script, kb, cfg, mode), kb
    except (PlanningError, InterpretationError, KBError) as exc:
        raise Diagnostics(str(exc)) from None


def _emit_trace(args: argparse.Namespace, timeline: Timeline) -> None:
    if args.emit_trace:
        Path(args.emit_trace).write_text(json.dumps(trace_to_dict(timeline.trace), indent=2) + "\n", encoding="utf-8")


def cmd_compile(args: argparse.Namespace, stdout, stderr) -> int:
    timeline, _ = _plan(args, Mode(args.mode or Mode.COHERENT), stderr)
    _write(args.out, timeline.to_json(), stdout)
    _emit_trace(args, timeline)
    return EXIT_OK


def trace_rows(script: Script, kb: ActionKB, cfg: EngineConfig) -> list[dict]:
    rows = []
    for step in run_valence(script, kb, cfg):
        for cs in step.by_character.values():
            rows.append(
                {
                    "slot": step.index,
                    "action_id": step.action_id,
                    "character": cs.character_id,
                    "role": cs.role.label,
                    "valence": cs.valence,
                    "prev_context": repr(cs.prev_context),
                    "context": repr(cs.context),
                    "delta": repr(cs.delta.value),
                    "significant": int(cs.delta.significant),
                    "direction": cs.delta.direction.value,
                    "connective": cs.connective.value,
                    "step_connective": step.connective.value,
                }
            )
    return rows


def cmd_trace(args: argparse.Namespace, stdout, stderr) -> int:
    cfg = _config(args)
    kb = _kb(args)
    script = _checked_script(args, kb, cfg, stderr)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(trace_rows(script, kb, cfg))
    _write(args.out, buf.getvalue(), stdout)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, stdout, stderr) -> int:
    if args.script.endswith(".json"):
        try:
            timeline = Timeline.from_json(_read(args.script, "timeline"))
        except (ValueError, KeyError, TypeError) as exc:
            raise Diagnostics(f"{args.script}: invalid timeline: {exc}") from None
        gestures = load_gesture_db(_read(args.gestures, "gesture database")) if args.gestures else None
    else:
        timeline, kb = _plan(args, Mode(args.mode or Mode.COHERENT), stderr)
        gestures = kb.gestures
        _emit_trace(args, timeline)
    try:
        result = run_timeline(timeline, gestures)
    except ExecutorError as exc:
        raise Diagnostics(str(exc)) from None
    _write(args.out, result.to_lines(), stdout)
    summary = stdout if args.out else stderr
    for actor, pose in result.final_stage.poses.items():
        print(f"{actor}: x={pose.x:.6f} y={pose.y:.6f} heading={pose.heading:.6f}", file=summary)
    print(f"distance: {result.final_stage.distance:.6f}", file=summary)
    print(f"ticks: {result.ticks}", file=summary)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, stdout, stderr) -> int:
    cfg = _config(args)
    kb = _kb(args)
    for gap in closure_gaps(kb) + hardware_gaps(kb):
        print(f"warning: {gap}", file=stderr)
    _checked_script(args, kb, cfg, stderr)
    print(f"{args.script}: ok", file=stdout)
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace, stdout, stderr) -> int:
    mode = Mode(args.mode or Mode.INCOHERENT_SPATIAL)
    if mode is Mode.COHERENT:
        raise UsageError("baseline needs --mode incoherent_spatial or incoherent_gesture")
    if args.out is None:
        raise UsageError("baseline needs --out DIR")
    coherent, _ = _plan(args, Mode.COHERENT, stderr)
    alternative, _ = _plan(args, mode, stderr)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "coherent.json").write_text(coherent.to_json(), encoding="utf-8")
    (out / f"{mode.value}.json").write_text(alternative.to_json(), encoding="utf-8")
    diffs = diff_timelines(coherent, alternative)
    report = "".join(f"{d}\n" for d in diffs)
    (out / "diff.txt").write_text(report, encoding="utf-8")
    print(f"{len(diffs)} changed field(s) written to {out / 'diff.txt'}", file=stdout)
    _emit_trace(args, coherent)
    return EXIT_OK


COMMANDS = {
    "compile": (cmd_compile, "plan a script into a timeline JSON document"),
    "trace": (cmd_trace, "per-step valence, context, delta and connective as CSV"),
    "simulate": (cmd_simulate, "replay a script or timeline through the blackboard executor"),
    "validate": (cmd_validate, "check a script against a knowledge base"),
    "baseline": (cmd_baseline, "write a coherent timeline next to an incoherent counterpart"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robostage", description="Interpretation-driven choreography for two robot actors.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("script", help="story script (.story); simulate also accepts a timeline (.json)")
        p.add_argument("--kb", required=name != "simulate", help="action knowledge base JSON")
        p.add_argument("--gestures", help="gesture database JSON (default: bundled fixture database)")
        p.add_argument("--config", help="JSON file of engine configuration fields")
        p.add_argument("--seed", type=int, help="override rng_seed")
        p.add_argument("--beta", type=float, help="override decay_weight")
        p.add_argument("--tau", type=float, help="override step_threshold")
        p.add_argument("--mode", choices=[m.value for m in Mode], help="experimental condition")
        p.add_argument("--emit-trace", help="also write the interpretation trace JSON here")
        p.add_argument("--out", help="output file (baseline: output directory)")
    return parser


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "simulate" and not args.script.endswith(".json") and args.kb is None:
        print("robostage: error: simulate needs --kb when given a script", file=stderr)
        return EXIT_USAGE
    handler = COMMANDS[args.command][0]
    try:
        return handler(args, stdout, stderr)
    except UsageError as exc:
        print(f"robostage: error: {exc}", file=stderr)
        return EXIT_USAGE
    except Diagnostics as exc:
        print(f"robostage: {exc}", file=stderr)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        print(f"robostage: error: {exc}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
