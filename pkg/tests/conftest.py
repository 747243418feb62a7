import sys
from pathlib import Path

import pytest

from tfsm import fixtures

# the oracles module sits beside the tests
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=fixtures.NAMES)
def fixture_name(request):
    return request.param


@pytest.fixture
def fig1a():
    return fixtures.load("fig1a")


@pytest.fixture
def fig2a():
    return fixtures.load("fig2a")


@pytest.fixture
def fig3a():
    return fixtures.load("fig3a")


@pytest.fixture
def m1():
    return fixtures.load("m1")


@pytest.fixture
def m2():
    return fixtures.load("m2")
