import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from splinewave import _backend  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run a test once per kernel backend."""
    before = _backend.backend_name()
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(before)
