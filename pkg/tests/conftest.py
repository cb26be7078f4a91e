import math

import numpy as np
import pytest

from fuchstools.freegroup import build_schottky, gamma2, symmetric_disks

LOG_3_2SQRT2 = math.log(3.0 + 2.0 * math.sqrt(2.0))


@pytest.fixture
def g2():
    return gamma2()


@pytest.fixture
def schottky2():
    """Rank 2, disks at 0, pi/2, pi, 3pi/2 of angular radius pi/8."""
    return build_schottky(2, symmetric_disks(2, math.pi / 8.0))


@pytest.fixture
def schottky3():
    return build_schottky(3, symmetric_disks(3, math.pi / 16.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
