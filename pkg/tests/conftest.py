import pytest

from taulab.hecke import EigenformSpec, warm_delta_cache


@pytest.fixture(scope="session")
def delta() -> EigenformSpec:
    return EigenformSpec.delta()


@pytest.fixture(scope="session")
def delta_warm_small(delta) -> EigenformSpec:
    """Built-in form with the series cache warmed to 10^4."""
    warm_delta_cache(10**4)
    return delta


@pytest.fixture(scope="session")
def delta_warm_million(delta) -> EigenformSpec:
    """Built-in form with the series cache warmed to 10^6."""
    warm_delta_cache(10**6)
    return delta
