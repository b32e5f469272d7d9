"""Shared fixtures: the 4x4 worked example as source text and as a
structured puzzle instance, plus compilation helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from logicforge.bench.puzzle import (
    AT_POSITION,
    DIRECTLY_LEFT,
    LEFT_OF,
    NOT_AT_POSITION,
    POSITION_FIELD,
    SAME_PERSON,
    Clue,
    Feature,
    PuzzleInstance,
    clue_holds,
)
from logicforge.bench.render import render_text
from logicforge.frontend import SourceText, check, parse
from logicforge.model import decode, lower
from logicforge.model.decode import SolutionTable

DATA_DIR = Path(__file__).parent / "data"

ZEBRA_FEATURES = (
    Feature("name", ("alice", "eric", "arnold", "peter")),
    Feature("occupation", ("artist", "engineer", "teacher", "doctor")),
    Feature("book", ("fantasy", "science fiction", "mystery", "romance")),
    Feature("phone", ("google pixel 6", "iphone 13", "oneplus 9", "samsung galaxy s21")),
)

# feature -> values by house position (houses 1..4 left to right)
ZEBRA_TRUTH = {
    "name": ("alice", "peter", "eric", "arnold"),
    "occupation": ("engineer", "artist", "teacher", "doctor"),
    "book": ("romance", "fantasy", "science fiction", "mystery"),
    "phone": ("google pixel 6", "samsung galaxy s21", "iphone 13", "oneplus 9"),
}

ZEBRA_CLUES = (
    Clue(DIRECTLY_LEFT, "occupation", "engineer", "phone", "samsung galaxy s21"),
    Clue(AT_POSITION, "book", "fantasy", pos=2),
    Clue(NOT_AT_POSITION, "name", "alice", pos=2),
    Clue(SAME_PERSON, "name", "eric", "occupation", "teacher"),
    Clue(SAME_PERSON, "phone", "samsung galaxy s21", "book", "fantasy"),
    Clue(SAME_PERSON, "phone", "iphone 13", "book", "science fiction"),
    Clue(LEFT_OF, "book", "science fiction", "phone", "oneplus 9"),
    Clue(SAME_PERSON, "phone", "oneplus 9", "name", "arnold"),
    Clue(SAME_PERSON, "occupation", "doctor", "book", "mystery"),
    Clue(SAME_PERSON, "phone", "iphone 13", "occupation", "teacher"),
)


def build_instance(
    puzzle_id: str,
    features: tuple[Feature, ...],
    clues: tuple[Clue, ...],
    truth: dict[str, tuple[str, ...]],
) -> PuzzleInstance:
    n = len(features[0].values)
    assert all(clue_holds(c, truth, n) for c in clues), "clue inconsistent with truth"
    columns = (POSITION_FIELD,) + tuple(f.name for f in features)
    rows = tuple(
        {POSITION_FIELD: i + 1, **{f.name: truth[f.name][i] for f in features}}
        for i in range(n)
    )
    table = SolutionTable(columns, rows, POSITION_FIELD)
    instance = PuzzleInstance(puzzle_id, n, len(features), features, clues, "", table)
    return PuzzleInstance(
        puzzle_id, n, len(features), features, clues, render_text(instance), table
    )


@pytest.fixture(scope="session")
def zebra_instance() -> PuzzleInstance:
    return build_instance("zebra-4x4", ZEBRA_FEATURES, ZEBRA_CLUES, ZEBRA_TRUTH)


@pytest.fixture(scope="session")
def zebra_source() -> SourceText:
    path = DATA_DIR / "zebra_4x4.lpy"
    return SourceText(path.read_text(encoding="utf-8"), str(path))


@pytest.fixture(scope="session")
def zebra_program(zebra_source):
    return check(parse(zebra_source), zebra_source.origin)


@pytest.fixture(scope="session")
def zebra_model(zebra_program):
    return lower(zebra_program)


def compile_source(text: str):
    """parse + check + lower in one step for inline test programs."""
    program = check(parse(SourceText(text, "<test>")), "<test>")
    return program, lower(program)
