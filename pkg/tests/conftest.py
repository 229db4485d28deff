import pytest

from kclink.golden import gauge_block_dataset, synthetic_dataset


@pytest.fixture
def gauge_block():
    return gauge_block_dataset()


@pytest.fixture
def synthetic():
    return synthetic_dataset()
