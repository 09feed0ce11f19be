import math

import numpy as np
import pytest
from scipy import integrate

from betaperturb.common.ensemble_kinds import EnsembleKind
from betaperturb.common.errors import DomainError, SingularityError
from betaperturb.density_service.normalizations import (
    laguerre_parameter,
    log_norm_gauss,
    log_norm_laguerre,
    log_norm_laguerre_s,
    log_norm_laguerre_t,
)
from betaperturb.density_service.service import (
    log_base_density,
    log_density_gauss_add,
    log_density_gauss_mult,
    log_density_laguerre_add,
    log_density_laguerre_hard,
    log_density_laguerre_mult,
)
from betaperturb.ensemble_service.models import EnsembleSpec, RngStream
from betaperturb.ensemble_service.scale_laws import ExponentialLaw, HalfNormalLaw, PointMassLaw
from betaperturb.ensemble_service.service import sample_spectral_data
from betaperturb.perturb_service.models import EigenConfiguration, PerturbationKind
from betaperturb.verify_service.service import pushforward_check, pushforward_discrepancy


def _single(x: float, l: float) -> EigenConfiguration:
    return EigenConfiguration(z=[complex(x, x * l)], l=l)


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("x, l", [(0.8, 0.5), (-1.7, 2.0), (0.05, 7.0)])
def test_gaussian_single_eigenvalue_density(beta, x, l):
    law = ExponentialLaw(rate=1.5)
    report = log_density_gauss_mult(_single(x, l), law, beta=beta)
    expected = -x ** 2 / 2 + math.log(1.5) - 1.5 * l - 0.5 * math.log(2 * math.pi) - math.log(abs(x))
    assert report.normalized
    assert report.log_value == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("x, l", [(0.3, 0.2), (2.5, 1.0), (6.0, 4.0)])
def test_laguerre_single_eigenvalue_density(x, l):
    law = HalfNormalLaw(sigma=2.0)
    report = log_density_laguerre_mult(_single(x, l), 2.0, 1, 1, law)
    expected = -x / 2 + law.log_density(l) - math.log(2.0 * x)
    assert report.log_value == pytest.approx(expected, abs=1e-12)


def test_gaussian_single_eigenvalue_density_integrates_to_one():
    law = ExponentialLaw()

    def integrand(l, x):
        return math.exp(log_density_gauss_mult(_single(x, l), law, beta=1.0).log_value) * abs(x)

    total, _ = integrate.dblquad(integrand, 0.0, 9.0, 0.0, 45.0)
    assert 2.0 * total == pytest.approx(1.0, abs=1e-6)


def test_normalization_constants():
    assert log_norm_laguerre_s(2.0, 1, 1) == pytest.approx(math.log(2.0), abs=1e-14)
    assert log_norm_gauss(2.0, 1).log_C == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-14)
    assert log_norm_laguerre(2.0, 1, 1).log_t is None
    assert log_norm_laguerre(2.0, 2, 4).log_s is None
    assert log_norm_laguerre(2.0, 2, 4).log_t == pytest.approx(log_norm_laguerre_t(2.0, 2, 4))
    assert laguerre_parameter(1.0, 5, 3) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        log_norm_laguerre_s(2.0, 2, 3)
    with pytest.raises(DomainError):
        log_norm_laguerre_t(2.0, 3, 3)
    with pytest.raises(DomainError):
        log_norm_gauss(0.0, 3)


@pytest.mark.parametrize("spec, law", [
    (EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=1.0, n=3), ExponentialLaw()),
    (EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=2.5, n=4), HalfNormalLaw(sigma=1.5)),
    (EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=2.0, n=3, m=4), ExponentialLaw(rate=0.5)),
    (EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=1.0, n=3, m=3), ExponentialLaw()),
    (EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=2.0, n=4, m=2), PointMassLaw(l0=1.0)),
])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_density_is_pushforward_of_base_density(spec, law, seed):
    assert pushforward_check(seed, spec, law) <= 1e-8


def test_additive_densities_match_up_to_a_constant():
    spec = EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=2.0, n=3)
    law = ExponentialLaw()
    offsets = []
    for stream in range(4):
        mu, l = sample_spectral_data(spec, law, RngStream(seed=9, stream=stream))
        offsets.append(pushforward_discrepancy(mu, l, spec, law, kind=PerturbationKind.ADDITIVE))
    assert np.ptp(offsets) < 1e-8


def test_point_mass_law_drops_constant():
    report = log_density_gauss_mult(_single(1.0, 1.0), PointMassLaw(l0=1.0), beta=2.0)
    assert not report.normalized
    assert report.constant == 0.0
    with pytest.raises(DomainError):
        log_density_gauss_mult(_single(1.0, 1.0), PointMassLaw(l0=2.0), beta=2.0)


def test_gaussian_density_rejects_bad_configurations():
    law = ExponentialLaw()
    with pytest.raises(SingularityError):
        log_density_gauss_mult(EigenConfiguration(z=[1.0 + 0j, 2.0 + 1j], l=1.0), law, beta=2.0)
    with pytest.raises(DomainError):
        log_density_gauss_mult(EigenConfiguration(z=[-1.0 + 1j], l=1.0), law, beta=2.0)
    with pytest.raises(DomainError):
        log_density_gauss_mult(_single(1.0, 1.0), law)


def test_laguerre_density_rejects_bad_configurations():
    law = ExponentialLaw()
    with pytest.raises(DomainError):
        log_density_laguerre_mult(EigenConfiguration(z=[1.0 - 1j], l=1.0), 2.0, 1, 1, law)
    with pytest.raises(DomainError):
        log_density_laguerre_mult(_single(1.0, 1.0), 2.0, 1, 2, law)
    with pytest.raises(DomainError):
        log_density_laguerre_hard(_single(1.0, 2.0), 2.0, 1, 3, 1.0)
    with pytest.raises(DomainError):
        log_density_laguerre_hard(_single(1.0, 0.5), 2.0, 2, 3, 1.0)


def test_laguerre_hard_density_terms():
    report = log_density_laguerre_hard(_single(2.0, 0.5), 2.0, 1, 2, 1.0)
    theta = math.atan(0.5)
    modulus = 2.0 * math.hypot(1.0, 0.5)
    gap = math.sin(theta) - math.cos(theta)
    assert report.normalized
    assert report.product == pytest.approx(0.0)
    report = log_density_laguerre_hard(_single(2.0, 0.5), 1.0, 1, 4, 1.0)
    assert report.product == pytest.approx(0.5 * (math.log(modulus) + math.log(abs(gap))))


def test_additive_density_is_unnormalized():
    config = EigenConfiguration(z=[0.5 + 0.3j, -1.0 + 0.4j], l=0.7, kind=PerturbationKind.ADDITIVE)
    report = log_density_gauss_add(config, ExponentialLaw(), beta=2.0)
    assert not report.normalized
    assert report.constant == 0.0


def test_base_density_checks_regime(hard_spec, laguerre_spec):
    law = ExponentialLaw()
    mu, l = sample_spectral_data(hard_spec, law, RngStream(seed=1))
    with pytest.raises(DomainError):
        log_base_density(mu, laguerre_spec, law, l)
    report = log_base_density(mu, hard_spec, law, l)
    assert report.scale == 0.0
    assert math.isfinite(report.log_value)


def test_laguerre_additive_density_terms():
    z = np.array([1.0 + 0.3j, 2.0 + 0.4j])
    config = EigenConfiguration(z=z, l=0.7, kind=PerturbationKind.ADDITIVE)
    report = log_density_laguerre_add(config, 2.0, 3, 2, ExponentialLaw())
    assert not report.normalized
    assert report.exponential == pytest.approx(-1.5)
    assert report.product == pytest.approx(math.log(abs(np.prod(z).real)))
    with pytest.raises(DomainError):
        log_density_laguerre_add(config, 2.0, 1, 2, ExponentialLaw())
