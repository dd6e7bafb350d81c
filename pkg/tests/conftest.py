import numpy as np
import pytest

from mcperturb import gallery


@pytest.fixture(scope="session")
def meyer():
    return gallery.meyer4()


@pytest.fixture(scope="session")
def funderlic():
    return gallery.funderlic8()


@pytest.fixture(scope="session")
def meyer_group_inverse_exact():
    # integer-matrix form of the known exact group inverse, scaled by 2/1083
    M = np.array(
        [
            [265, -61, -96, -108],
            [-96, 300, -96, -108],
            [-115, -137, 246, 6],
            [-210, -156, -210, 576],
        ],
        dtype=float,
    )
    return (2.0 / 1083.0) * M


def random_irreducible_chain(rng, n, sparsity=0.0):
    """Random row-stochastic matrix, made irreducible by a uniform floor."""
    P = rng.random((n, n))
    if sparsity > 0:
        P = P * (rng.random((n, n)) > sparsity)
    P = P + 0.05
    return P / P.sum(axis=1, keepdims=True)
