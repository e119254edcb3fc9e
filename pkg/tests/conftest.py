import numpy as np
import pytest

from heavychain.model import (
    ControllerGains,
    PhysicalParams,
    derive_physical_thetas,
    rescale,
)

# Reference configuration used across the suite: unit chain with a 2.5x
# critical damping-style gain, everything else at 1.
REF_PARAMS = PhysicalParams(rho=1.0, L=1.0, m_p=1.0, m_c=1.0, g=9.81)
REF_GAINS = ControllerGains(chi1=1.0, chi2=1.0, chi3=2.5)


@pytest.fixture(scope="session")
def ref_params():
    return REF_PARAMS


@pytest.fixture(scope="session")
def ref_gains():
    return REF_GAINS


@pytest.fixture(scope="session")
def ref_model():
    return rescale(REF_PARAMS, derive_physical_thetas(REF_PARAMS, REF_GAINS))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260814)
