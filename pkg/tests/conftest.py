import pytest

from capacitylab import hard_square_system, monomer_dimer_system


@pytest.fixture(scope="session")
def hs2():
    return hard_square_system(2)


@pytest.fixture(scope="session")
def hs3():
    return hard_square_system(3)


@pytest.fixture(scope="session")
def md1():
    return monomer_dimer_system(1)


@pytest.fixture(scope="session")
def md2():
    return monomer_dimer_system(2)
