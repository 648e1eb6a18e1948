from __future__ import annotations

import random
from pathlib import Path

import pytest

from robostage.config import EngineConfig
from robostage.kb import ActionKB, fixture_path, load_fixture_kb
from robostage.script import Script, parse_script

FIXTURE_STORIES = ("scenario1", "scenario2", "scenario3", "irony", "unroll", "neutral")
GOLDEN = Path(__file__).parent / "golden"

ACCEPTANCE_LINES: list[str] = []


def story(name: str) -> Script:
    return parse_script(fixture_path(f"{name}.story").read_text())


def random_script(kb: ActionKB, rng: random.Random, max_len: int = 12) -> Script:
    actions = kb.action_ids()
    lines = ["characters: A=Ann, B=Bea"]
    for _ in range(rng.randint(1, max_len)):
        agent, patient = ("A", "B") if rng.random() < 0.5 else ("B", "A")
        lines.append(f"{agent} {rng.choice(actions)} {patient}")
    return parse_script("\n".join(lines))


@pytest.fixture(scope="session")
def kb() -> ActionKB:
    return load_fixture_kb()


@pytest.fixture
def cfg() -> EngineConfig:
    return EngineConfig()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
