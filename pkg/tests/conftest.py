import numpy as np
import pytest

from betaperturb.common.ensemble_kinds import EnsembleKind
from betaperturb.common.models import JacobiMatrix
from betaperturb.common.settings import Settings
from betaperturb.ensemble_service.models import EnsembleSpec, RngStream
from betaperturb.ensemble_service.service import sample_jacobi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def gauss_spec():
    return EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=2.0, n=6)


@pytest.fixture
def laguerre_spec():
    return EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=2.0, n=3, m=4)


@pytest.fixture
def hard_spec():
    return EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=2.0, n=4, m=2)


@pytest.fixture
def gauss_jacobi(gauss_spec):
    return sample_jacobi(gauss_spec, RngStream(seed=11))


@pytest.fixture
def small_jacobi():
    return JacobiMatrix(b=[1.0, -0.5, 2.0], a=[0.7, 1.3])
