import numpy as np
import pytest

from subsystem_codes.codes import build_bbs, build_shp, hamming_7_4, repetition
from subsystem_codes.gf2 import BinaryMatrix

# Q giving the 21-qubit BBS code of the Hamming code
BBS21_Q = ["0010", "0101", "1000", "0100"]


@pytest.fixture(scope="session")
def hamming():
    return hamming_7_4()


@pytest.fixture(scope="session")
def rep3():
    return repetition(3)


@pytest.fixture(scope="session")
def bbs21(hamming):
    return build_bbs(hamming, hamming, BinaryMatrix.from_strings(BBS21_Q), name="bbs21")


@pytest.fixture(scope="session")
def shp49(hamming):
    return build_shp(hamming.H, hamming.H, name="shp49")


@pytest.fixture(scope="session")
def bacon_shor(rep3):
    return build_bbs(rep3, rep3, BinaryMatrix.identity(1), name="bacon-shor")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
