from __future__ import annotations

from pathlib import Path

import pytest

from traitproof import parse_program, solve_query, validate_program

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load_corpus(name: str):
    source = (CORPUS / name).read_text()
    return source, validate_program(parse_program(source, f"corpus/{name}"))


@pytest.fixture(scope="session")
def tostring_program():
    return load_corpus("tostring.tdl")[1]


@pytest.fixture(scope="session")
def bevy_program():
    return load_corpus("bevy_mini.tdl")[1]


@pytest.fixture(scope="session")
def tostring_trees(tostring_program):
    return [solve_query(q, tostring_program) for q in tostring_program.queries]


@pytest.fixture(scope="session")
def bevy_tree(bevy_program):
    return solve_query(bevy_program.queries[0], bevy_program)
