import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from momentloc.liecore import build_root_system


@pytest.fixture(scope="session")
def a1():
    return build_root_system("A1", "basic")


@pytest.fixture(scope="session")
def a1_su2():
    return build_root_system("A1", "paper_su2")


@pytest.fixture(scope="session")
def a2():
    return build_root_system("A2", "basic")


@pytest.fixture(scope="session")
def g2():
    return build_root_system("G2", "basic")
