import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("RUN_FULLSCALE"):
        return
    skip = pytest.mark.skip(reason="cluster-scale run; set RUN_FULLSCALE=1 to enable")
    for item in items:
        if "fullscale" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def awgn_pair(rng, n, snr_linear, h=1.0 + 0j, pols=2):
    """Gaussian input and its noisy scaled copy at the given SNR."""
    x = (rng.standard_normal((pols, n)) + 1j * rng.standard_normal((pols, n))) / np.sqrt(2)
    s2 = abs(h) ** 2 / snr_linear
    noise = np.sqrt(s2 / 2) * (rng.standard_normal((pols, n))
                               + 1j * rng.standard_normal((pols, n)))
    return x, h * x + noise
