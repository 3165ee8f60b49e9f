"""Shared fixtures.

The linalg kernels are JIT-compiled on first use under the numba backend;
the session-scoped warmup keeps that one-time cost out of every timed
assertion below.
"""

import numpy as np
import pytest

from steklov_annulus import linalg


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    linalg.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
