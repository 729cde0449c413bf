import numpy as np
import pytest

from elagp.featurespace import build_reference
from elagp.sampling import DoeDesign


@pytest.fixture(scope="session")
def design2():
    return DoeDesign(2, 0)


@pytest.fixture(scope="session")
def ref2():
    """The d=2 reference corpus (takes ~15 s to build, shared session-wide)."""
    return build_reference(2, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
