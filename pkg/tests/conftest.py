from pathlib import Path

import pytest

from cm2cypher import parse_dsl

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
GOLDEN = FIXTURES / "golden"
REFERENCE = Path(__file__).resolve().parent / "data" / "reference"


@pytest.fixture(scope="session")
def demo():
    return parse_dsl((FIXTURES / "demo.2cm").read_text(encoding="utf-8"))
