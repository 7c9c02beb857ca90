"""Scoring finalists against a heuristic suite and short-listing.

Every heuristic is worth one point; a candidate's score is the number of
heuristics whose formula evaluates to True for it.  Candidates are then
reordered by score, descending, with ties broken by their original
pipeline position (stable), and ranks assigned from 1.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Sequence

from .dsl import EvalContext, Formula, evaluate, parse_heuristics
from .tactic import Candidate, SubgoalSet


@dataclass(frozen=True)
class Heuristic:
    name: str
    formula: Formula


@dataclass(frozen=True)
class ScoredCandidate:
    candidate: Candidate
    score: int
    verdicts: tuple[bool, ...]
    rank: int
    pipeline_index: int


def load_suite(text: str, file: str = "<heuristics>") -> tuple[Heuristic, ...]:
    """Parse a suite; formulas arrive closed and well-sorted or not at all.
    Atom arguments are bound variables or numerals, so no formula can name
    theory constants."""
    return tuple(Heuristic(name, formula)
                 for name, formula in parse_heuristics(text, file))


def default_suite() -> tuple[Heuristic, ...]:
    text = (resources.files("inductrank") / "data" /
            "default.heuristics").read_text(encoding="utf-8")
    return load_suite(text, "default.heuristics")


ContextFactory = Callable[[Candidate, SubgoalSet], EvalContext]


def score_all(entries: Sequence[tuple[Candidate, SubgoalSet]],
              suite: Sequence[Heuristic],
              ctx_factory: ContextFactory,
              parallel: bool = False) -> list[ScoredCandidate]:
    """Score every entry against every heuristic and sort by score.

    `entries` must be in pipeline order; that order is the tie-break.
    With `parallel` the per-candidate evaluations run on a thread pool;
    the aggregation is a deterministic reduction either way.
    """

    def verdicts_for(entry: tuple[Candidate, SubgoalSet]) -> tuple[bool, ...]:
        candidate, subgoals = entry
        ctx = ctx_factory(candidate, subgoals)
        return tuple(evaluate(h.formula, ctx) for h in suite)

    if parallel and entries:
        with ThreadPoolExecutor(max_workers=4) as pool:
            all_verdicts = list(pool.map(verdicts_for, entries))
    else:
        all_verdicts = [verdicts_for(e) for e in entries]

    unranked = [
        (candidate, sum(v), v, i)
        for i, ((candidate, _), v) in enumerate(zip(entries, all_verdicts))
    ]
    unranked.sort(key=lambda item: (-item[1], item[3]))
    return [
        ScoredCandidate(candidate, score, verdicts, rank, index)
        for rank, (candidate, score, verdicts, index)
        in enumerate(unranked, start=1)
    ]


def shortlist(scored: Sequence[ScoredCandidate],
              k: int) -> list[ScoredCandidate]:
    if k < 1:
        raise ValueError("k must be positive")
    return list(scored[:k])
