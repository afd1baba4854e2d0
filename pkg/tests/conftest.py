import numpy as np
import pytest

from semloc.geometry import random_rotation

_acceptance_lines: list[str] = []


def report(name: str, ok: bool, detail: str) -> None:
    """Queue one pass/fail line per acceptance criterion; the terminal
    summary hook prints them after the run, outside output capture."""
    status = "PASS" if ok else "FAIL"
    _acceptance_lines.append(f"ACCEPTANCE [{name}] {status} :: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_rigid(rng) -> tuple[np.ndarray, np.ndarray]:
    return random_rotation(rng), rng.uniform(-5.0, 5.0, size=3)
