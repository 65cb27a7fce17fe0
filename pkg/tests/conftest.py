"""Session fixtures holding the expensive default-profile frames."""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sonine_lab.profiles import PROFILES  # noqa: E402
from sonine_lab.spaces import build_H_Lambda, build_K_ab, split_G_eigenspaces  # noqa: E402
from sonine_lab.zeta_lab import build_HP_Lambda, build_W_Lambda  # noqa: E402

DEFAULT = PROFILES["default"]


@pytest.fixture(scope="session")
def grid():
    return DEFAULT.grid()


@pytest.fixture(scope="session")
def H2(grid):
    return build_H_Lambda(2.0, grid)


@pytest.fixture(scope="session")
def K55(grid):
    return build_K_ab(0.5, 0.5, grid)


@pytest.fixture(scope="session")
def W2(grid):
    return build_W_Lambda(2.0, 8, grid)


@pytest.fixture(scope="session")
def split2(H2):
    return split_G_eigenspaces(H2)


@pytest.fixture(scope="session")
def HP2(H2, W2):
    return build_HP_Lambda(H2, W2)
