import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geomodel.chase import chase
from geomodel.rules import parse_program

MARRIAGE = """
Wife(anna).
Wife(marie).
Wife(X), Married(X,Y) -> Husband(Y).
Wife(Y) -> exists X. Husband(X), Married(X,Y).
Husband(X), Wife(X) -> false.
"""

DIAGONAL = """
R1(a1,a1).
R1(a2,a2).
R2(a1,a2).
R2(a2,a1).
R1(X,Y), R2(X,Y) -> false.
"""


@pytest.fixture(scope="session")
def marriage_kb():
    return parse_program(MARRIAGE)


@pytest.fixture(scope="session")
def marriage_model(marriage_kb):
    result = chase(marriage_kb)
    assert result.is_model
    return result.atoms


@pytest.fixture(scope="session")
def diagonal_kb():
    return parse_program(DIAGONAL)


@pytest.fixture(scope="session")
def diagonal_model(diagonal_kb):
    result = chase(diagonal_kb)
    assert result.is_model
    return result.atoms
