import pytest

from lszeta.liecore import build_group
from lszeta.parabolic import build_structure

_GROUPS = {}
_STRUCTURES = {}


def group(name):
    if name not in _GROUPS:
        _GROUPS[name] = build_group(name)
    return _GROUPS[name]


def structure(name):
    if name not in _STRUCTURES:
        _STRUCTURES[name] = build_structure(group(name))
    return _STRUCTURES[name]


@pytest.fixture(scope="session")
def groups():
    return group


@pytest.fixture(scope="session")
def structures():
    return structure
