import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


@pytest.fixture
def circle_clean():
    from despeckle_tdm.phantoms import circle
    return circle(64, 64)
