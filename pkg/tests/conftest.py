import numpy as np
import pytest

from fmes import assemble, build_mesh, inverse_iteration, modal_decompose


@pytest.fixture(scope="session")
def sys6():
    return assemble(build_mesh(6))


@pytest.fixture(scope="session")
def pair6(sys6):
    return inverse_iteration(sys6)


@pytest.fixture(scope="session")
def basis6(sys6):
    return modal_decompose(sys6)


@pytest.fixture(scope="session")
def sys11():
    return assemble(build_mesh(11))


@pytest.fixture(scope="session")
def pair11(sys11):
    return inverse_iteration(sys11, min_iter=10)


@pytest.fixture(scope="session")
def basis11(sys11):
    return modal_decompose(sys11)


@pytest.fixture(scope="session")
def sys26():
    return assemble(build_mesh(26))


@pytest.fixture(scope="session")
def pair26(sys26):
    return inverse_iteration(sys26)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
