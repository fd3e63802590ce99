"""Shared fixtures for the test suite."""

from importlib.resources import files

import pytest

from csmimo.csmux import MuxConfig
from csmimo.modem import get_constellation


@pytest.fixture(scope="session")
def qpsk():
    return get_constellation("qpsk")


@pytest.fixture(scope="session")
def qam16():
    return get_constellation("qam16")


@pytest.fixture(scope="session")
def cfg_4x4_l8():
    """The 4x4 setup with eight multiplexed streams, two sub-blocks."""
    return MuxConfig(nt=4, nr=4, l=8, j=2, phi_seed=880)


@pytest.fixture(scope="session")
def cfg_2x2_l4():
    return MuxConfig(nt=2, nr=2, l=4, j=2, phi_seed=3262)


def recipe_path(name: str) -> str:
    return str(files("csmimo") / "recipes" / name)
