import math

import pytest

from ellassoc.monodromy import kz_associator, kzb_pair
from ellassoc.presentations import GammaSpec

MU = 2j * math.pi


@pytest.fixture(scope="session")
def kz3():
    return kz_associator(3, precision="double")


@pytest.fixture(scope="session")
def kzb_trivial():
    return kzb_pair(GammaSpec(1, 1), 1j, 3, precision="double")


@pytest.fixture(scope="session")
def kzb_z2():
    return kzb_pair(GammaSpec(2, 1), 1j, 3, precision="double")
