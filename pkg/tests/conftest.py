from __future__ import annotations

import sys
from pathlib import Path

import pytest

from scase.casefile import parse_case

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
DATA = TESTS_DIR.parent / "src" / "scase" / "data"

sys.path.insert(0, str(TESTS_DIR))  # makes `oracles` importable from tests


def corpus_paths(suffix: str) -> list[Path]:
    paths = sorted(FIXTURES.glob(f"*{suffix}")) + sorted(DATA.glob(f"*{suffix}"))
    return paths


@pytest.fixture(scope="session")
def holistic_case():
    return parse_case((DATA / "holistic.scase").read_text(encoding="utf-8"))


@pytest.fixture()
def single_leaf_case():
    return parse_case((FIXTURES / "single_leaf.scase").read_text(encoding="utf-8"))


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")
