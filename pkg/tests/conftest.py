import pytest
import numpy as np

from renyicones.hermitian import random_hermitian, random_positive_definite


PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pd_pair(rng):
    "A random 3x3 complex positive definite pair, condition number at most 4, with a unit-norm direction pair."
    X = random_positive_definite(rng, 3, spread=4.0)
    Y = random_positive_definite(rng, 3, spread=4.0)
    H = random_hermitian(rng, 3)
    V = random_hermitian(rng, 3)
    norm = np.sqrt(np.linalg.norm(H) ** 2 + np.linalg.norm(V) ** 2)
    return X, Y, H / norm, V / norm
