import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from pidgraph import build_graph, condense, parse_dexpi

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
REFERENCE = FIXTURES / "reference_sample.xml"


@pytest.fixture(scope="session")
def reference_text() -> str:
    return REFERENCE.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def reference_model(reference_text):
    return parse_dexpi(reference_text)


@pytest.fixture(scope="session")
def complete_graph(reference_model):
    return build_graph(reference_model)


@pytest.fixture(scope="session")
def condensed_pair(complete_graph):
    return condense(complete_graph)


@pytest.fixture(scope="session")
def high_graph(condensed_pair):
    return condensed_pair[0]


@pytest.fixture(scope="session")
def reduction_report(condensed_pair):
    return condensed_pair[1]
