import numpy as np
import pytest

from weylprior import get_model


@pytest.fixture(scope="session")
def g1():
    return get_model("gaussian1d")


@pytest.fixture(scope="session")
def mv2():
    return get_model("gaussian_mv", n=2)


@pytest.fixture(scope="session")
def bern():
    return get_model("bernoulli")


@pytest.fixture(scope="session")
def pois():
    return get_model("poisson")


def vech_theta(mu, sigma):
    """Reference-chart point for gaussian_mv from (mu, Sigma)."""
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    tri = [sigma[i, j] for i in range(n) for j in range(i, n)]
    return np.concatenate([np.asarray(mu, dtype=float), tri])
