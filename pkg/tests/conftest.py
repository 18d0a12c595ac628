import numpy as np
import pytest
from hypothesis import settings

from krausnd.families import amplitude_damping, cyclic_shift, projective_qubit, shift_pair

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def damping():
    return amplitude_damping(0.5)


@pytest.fixture
def projective():
    return projective_qubit()


@pytest.fixture
def cyclic4():
    return shift_pair(cyclic_shift(4))


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, d):
    G = random_complex(rng, (d, d))
    return G + G.conj().T
