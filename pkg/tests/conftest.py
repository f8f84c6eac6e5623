import numpy as np
import pytest

# chi-square critical values at the 0.999 level (reject below p = 0.001)
CHI2_CRIT_999 = {1: 10.827566170662733, 99: 148.23035916510173}


@pytest.fixture
def gen():
    """numpy generator for test-side randomness, independent of the package's."""
    return np.random.default_rng(987654321)
