import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_probmap(rng, h, w, c):
    raw = rng.random((h, w, c)) + 1e-3
    return raw / raw.sum(axis=2, keepdims=True)
