import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from ucm.parser import parse_model

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDEN = pathlib.Path(__file__).parent / "golden"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / name


def load_fixture(name: str):
    return parse_model(fixture_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def perception_doc():
    return load_fixture("perception-chain.ucm")


@pytest.fixture(scope="session")
def verbatim_doc():
    return load_fixture("perception-chain-verbatim.ucm")


@pytest.fixture(scope="session")
def tree_doc():
    return load_fixture("three-leg-tree.ucm")


@pytest.fixture(scope="session")
def evidential_doc():
    return load_fixture("single-evidential.ucm")
