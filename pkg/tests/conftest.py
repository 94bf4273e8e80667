import numpy as np
import pytest

from gl4lab.arith import primes_upto
from gl4lab.hecke import CoefficientTable, eisenstein_gl2, sym3_lift
from gl4lab.oscillatory.kernel import BesselSpec, calibrate

SYM3_T = 0.7


@pytest.fixture(scope="session")
def gl2_eis():
    return eisenstein_gl2(SYM3_T, primes_upto(20000))


@pytest.fixture(scope="session")
def sym3_table(gl2_eis):
    return CoefficientTable(sym3_lift(gl2_eis))


@pytest.fixture(scope="session")
def sym3_spec():
    t = SYM3_T
    return calibrate(BesselSpec((3j * t, 1j * t, -1j * t, -3j * t)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
