"""Deterministic multi-actor replay of a timeline through a shared blackboard.

Each actor walks its own tracks, posting ``start`` and ``end`` records on
simulated 0.1 s ticks. Actors meet at a barrier after every slot; the
next slot starts one tick after the last actor finished. The blackboard
serializes every write through a single lock and the trace is ordered by
a total key, so any interleaving of actors (round robin, permuted, or
real threads) yields the same trace.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .choreographer import MovementEvent, StageState, Timeline
from .kb import GestureDB

TICK_S = 0.1
_PHASE_RANK = {"start": 0, "end": 1}

Scheduler = Callable[[Sequence[str]], str]


class ExecutorError(RuntimeError):
    pass


class BarrierViolation(ExecutorError):
    """An actor posted into a slot whose barrier had not been released."""


class BarrierTimeout(ExecutorError):
    """No actor can make progress; the barrier will never release."""


def to_ticks(seconds: float) -> int:
    # rounding first keeps 2.5 / 0.1 from landing on 25.000000000000004
    return math.ceil(round(seconds / TICK_S, 6))


@dataclass(frozen=True, order=True)
class Post:
    tick: int
    actor_rank: int
    slot: int
    event_index: int
    phase_rank: int
    actor: str
    event: str

    @property
    def phase(self) -> str:
        return "start" if self.phase_rank == 0 else "end"

    def to_line(self) -> str:
        return f"{self.tick}\t{self.actor}\t{self.slot}\t{self.event_index}:{self.event}\t{self.phase}"


class Blackboard:
    """Append-only post log with per-slot barriers."""

    def __init__(self, actors: Sequence[str]):
        self.actors = tuple(actors)
        self._rank = {a: i for i, a in enumerate(self.actors)}
        self._posts: list[Post] = []
        self._arrived: dict[int, dict[str, int]] = {}
        self._slot_start: dict[int, int] = {0: 0}
        self._lock = threading.Condition()

    @property
    def posts(self) -> tuple[Post, ...]:
        with self._lock:
            return tuple(self._posts)

    def released(self, slot: int) -> bool:
        """Whether ``slot`` may be entered."""
        with self._lock:
            return slot in self._slot_start

    def slot_start(self, slot: int) -> int:
        with self._lock:
            if slot not in self._slot_start:
                raise BarrierViolation(f"slot {slot} barrier not yet released")
            return self._slot_start[slot]

    def post(self, actor: str, slot: int, event_index: int, event: str, phase: str, tick: int) -> int:
        """Append one record and return its intake index."""
        with self._lock:
            if actor not in self._rank:
                raise ExecutorError(f"unknown actor {actor!r}")
            start = self._slot_start.get(slot)
            if start is None or tick < start:
                raise BarrierViolation(f"{actor} posted slot {slot} at tick {tick} ahead of its barrier")
            if actor in self._arrived.get(slot, {}):
                raise BarrierViolation(f"{actor} already left slot {slot}")
            self._posts.append(
                Post(tick, self._rank[actor], slot, event_index, _PHASE_RANK[phase], actor, event)
            )
            return len(self._posts) - 1

    def arrive(self, actor: str, slot: int, tick: int) -> None:
        """Record that ``actor`` finished ``slot`` at ``tick``; release the next slot when all have."""
        with self._lock:
            arrived = self._arrived.setdefault(slot, {})
            arrived[actor] = tick
            if len(arrived) == len(self.actors):
                self._slot_start[slot + 1] = max(arrived.values()) + 1
                self._lock.notify_all()

    def wait_released(self, slot: int, timeout: float) -> None:
        with self._lock:
            if not self._lock.wait_for(lambda: slot in self._slot_start, timeout=timeout):
                raise BarrierTimeout(f"slot {slot} barrier not released within {timeout} s")


def post(bb: Blackboard, actor: str, slot: int, event_ref: tuple[int, str], phase: str, tick: int) -> int:
    index, label = event_ref
    return bb.post(actor, slot, index, label, phase, tick)


@dataclass(frozen=True)
class ExecutionTrace:
    posts: tuple[Post, ...]
    final_stage: StageState
    ticks: int

    def to_lines(self) -> str:
        return "".join(p.to_line() + "\n" for p in self.posts)


def _event_ticks(start: int, event: MovementEvent) -> tuple[int, int]:
    on = start + to_ticks(event.onset_s)
    end = start + to_ticks(event.onset_s + event.duration_s)
    return on, max(on + 1, end)


def _actor(bb: Blackboard, actor: str, timeline: Timeline, poses: dict) -> Iterator[bool]:
    """One actor's script of posts.

    Yields True after each blackboard write and False while blocked on a
    barrier.
    """
    pose = timeline.initial_poses[actor]
    for slot in timeline.slots:
        while not bb.released(slot.index):
            yield False
        start = bb.slot_start(slot.index)
        events = slot.tracks.get(actor, ())
        records = []
        for i, e in enumerate(events):
            on, off = _event_ticks(start, e)
            records.append((on, i, "start", e))
            records.append((off, i, "end", e))
        records.sort(key=lambda r: (r[0], r[1], _PHASE_RANK[r[2]]))
        finish = start
        for tick, i, phase, e in records:
            post(bb, actor, slot.index, (i, e.label()), phase, tick)
            finish = max(finish, tick)
            yield True
        for e in events:
            if e.transform is not None:
                pose = e.transform.apply(pose)
        bb.arrive(actor, slot.index, finish)
        yield True
    poses[actor] = pose


def round_robin() -> Scheduler:
    state = {"n": 0}

    def pick(ready: Sequence[str]) -> str:
        choice = ready[state["n"] % len(ready)]
        state["n"] += 1
        return choice

    return pick


def seeded_scheduler(seed: int) -> Scheduler:
    rng = random.Random(seed)
    return lambda ready: ready[rng.randrange(len(ready))]


def fixed_priority(order: Sequence[str]) -> Scheduler:
    """Always run the first ready actor in ``order``."""
    return lambda ready: min(ready, key=list(order).index)


def _check_gestures(timeline: Timeline, gestures: GestureDB) -> None:
    for slot in timeline.slots:
        for actor, events in slot.tracks.items():
            for e in events:
                if e.gesture_id is not None and e.gesture_id not in gestures:
                    raise ExecutorError(f"slot {slot.index} {actor}: unknown gesture {e.gesture_id!r}")


def _finish(bb: Blackboard, timeline: Timeline, poses: dict) -> ExecutionTrace:
    ordered = tuple(sorted(bb.posts))
    ticks = ordered[-1].tick if ordered else 0
    final = StageState({a: poses[a] for a in timeline.actors})
    return ExecutionTrace(ordered, final, ticks)


def run_timeline(
    timeline: Timeline,
    gestures: GestureDB | None = None,
    scheduler: Scheduler | None = None,
    max_steps: int = 1_000_000,
) -> ExecutionTrace:
    """Replay ``timeline`` with cooperatively scheduled actors.

    ``scheduler`` picks which ready actor advances next; the trace does not
    depend on that choice.
    """
    if gestures is not None:
        _check_gestures(timeline, gestures)
    pick = scheduler or round_robin()
    bb = Blackboard(timeline.actors)
    poses: dict = {}
    running = {a: _actor(bb, a, timeline, poses) for a in timeline.actors}
    stalled: set[str] = set()
    for _ in range(max_steps):
        if not running:
            return _finish(bb, timeline, poses)
        ready = [a for a in running if a not in stalled]
        actor = pick(ready)
        try:
            progressed = next(running[actor])
        except StopIteration:
            del running[actor]
            stalled.clear()
            continue
        if progressed:
            stalled.clear()
        else:
            stalled.add(actor)
            if stalled >= set(running):
                raise BarrierTimeout("every remaining actor is waiting on a barrier")
    raise BarrierTimeout(f"no completion within {max_steps} scheduler steps")


def run_timeline_threaded(timeline: Timeline, gestures: GestureDB | None = None, timeout: float = 10.0) -> ExecutionTrace:
    """Replay with one thread per actor; the trace equals :func:`run_timeline`."""
    if gestures is not None:
        _check_gestures(timeline, gestures)
    bb = Blackboard(timeline.actors)
    poses: dict = {}
    errors: list[BaseException] = []

    def body(actor: str) -> None:
        try:
            for progressed in _actor(bb, actor, timeline, poses):
                if not progressed:
                    closed = next((s.index for s in timeline.slots if not bb.released(s.index)), None)
                    if closed is not None:
                        bb.wait_released(closed, timeout)
        except BaseException as exc:  # surfaced on the calling thread
            errors.append(exc)

    threads = [threading.Thread(target=body, args=(a,), daemon=True) for a in timeline.actors]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout)
    if errors:
        raise errors[0]
    if any(t.is_alive() for t in threads):
        raise BarrierTimeout("actor threads did not finish")
    return _finish(bb, timeline, poses)
