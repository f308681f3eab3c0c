from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

import pytest

from proprank.profile_io import MODELS, gen_profile

sys.path.insert(0, str(Path(__file__).parent))

SUITE_SIZE = 200
PROFILES_DIR = Path(__file__).resolve().parent.parent / "profiles"


def suite_params(seed: int):
    """``(model, m, support)`` of the seeded suite entry ``seed``."""
    return MODELS[seed % len(MODELS)], 4 + seed % 4, 1 + seed % 8


@lru_cache(maxsize=None)
def suite_profile(seed: int):
    model, m, support = suite_params(seed)
    return gen_profile(model, m, support, seed)


@lru_cache(maxsize=None)
def suite():
    return [suite_profile(s) for s in range(SUITE_SIZE)]


@pytest.fixture(scope="session")
def profiles():
    return suite()


@pytest.fixture(scope="session")
def profiles_dir():
    return PROFILES_DIR


@pytest.fixture
def acceptance_log(request):
    """Collects ``criterion N: PASS|FAIL`` lines for the terminal summary."""
    return request.config.__dict__.setdefault("_acceptance_lines", [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
