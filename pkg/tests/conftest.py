from __future__ import annotations

import pytest

import inductrank
from inductrank import parse_theory


@pytest.fixture(scope="session")
def corpus_dir():
    return inductrank.corpus_dir()


@pytest.fixture(scope="session")
def running_theory(corpus_dir):
    path = corpus_dir / "running.thy"
    return parse_theory(path.read_text(encoding="utf-8"), "running.thy")


@pytest.fixture(scope="session")
def running_goal(running_theory):
    return running_theory.goal_named("itrev_rev")
