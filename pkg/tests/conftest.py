import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from liquidweight.services.fixtures import load_fixture  # noqa: E402
from liquidweight.services.graph_core import build_profile  # noqa: E402
from liquidweight.services.influence import SuspendibleProfile  # noqa: E402


@pytest.fixture
def figure2_document():
    return load_fixture("figure2")


@pytest.fixture
def figure2(figure2_document):
    return figure2_document.to_suspendible(uniform=0.5)


@pytest.fixture
def figure3():
    return load_fixture("figure3").to_suspendible(uniform=0.5)


@pytest.fixture
def chain_xye():
    """x -> y -> e with e the endpoint"""
    return build_profile({"x", "y", "e"}, {"x": "y", "y": "e"})


@pytest.fixture
def two_cycle():
    return SuspendibleProfile.uniform(build_profile({"a", "b"}, {"a": "b", "b": "a"}), 0.5)
