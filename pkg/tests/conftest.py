import numpy as np
import pytest

from conewave.cluster_kernel import make_amplitude, make_chi
from conewave.cone_geom import Cone
from conewave.spectrum import TruncatedCone


@pytest.fixture(scope="session")
def chi():
    return make_chi(0.1)


@pytest.fixture(scope="session")
def amp_cache(chi):
    cache = {}

    def get(lam):
        if lam not in cache:
            cache[lam] = make_amplitude(chi, float(lam))
        return cache[lam]

    return get


@pytest.fixture(scope="session")
def disk():
    return TruncatedCone(Cone(1.0), 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(2024)
