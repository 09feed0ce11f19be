import math

import numpy as np
import pytest

from betaperturb.common.ensemble_kinds import EnsembleKind
from betaperturb.common.errors import DomainError, SizeError
from betaperturb.common.models import JacobiMatrix
from betaperturb.common.numerics import arg_half_period
from betaperturb.ensemble_service.models import EnsembleSpec, RngStream
from betaperturb.ensemble_service.scale_laws import PointMassLaw
from betaperturb.ensemble_service.service import sample_jacobi, sample_spectral_data
from betaperturb.jacobi_service.service import jacobi_to_measure, positive_eigenvalue_count
from betaperturb.perturb_service.dense import (
    dense_additive,
    dense_multiplicative,
    quaternion_block_matrix,
    quaternion_embed,
)
from betaperturb.perturb_service.models import EigenConfiguration, PerturbationKind, Quaternion
from betaperturb.perturb_service.service import (
    additive_charpoly,
    chiral_spectrum,
    eigenvalues_additive,
    eigenvalues_additive_from_measure,
    eigenvalues_from_measure,
    eigenvalues_multiplicative,
    forward_map,
    full_wishart_zero_count,
    multiplicative_charpoly,
    symplectic_double,
)
from betaperturb.verify_service.oracles import match_roots


def test_multiplicative_charpoly_matches_dense(small_jacobi):
    poly = multiplicative_charpoly(small_jacobi, 0.8)
    expected = np.poly(dense_multiplicative(small_jacobi, 0.8))[::-1]
    assert np.allclose(poly.coef, expected, atol=1e-12)


def test_additive_charpoly_matches_dense(small_jacobi):
    poly = additive_charpoly(small_jacobi, 0.8)
    expected = np.poly(dense_additive(small_jacobi, 0.8))[::-1]
    assert np.allclose(poly.coef, expected, atol=1e-12)


def test_charpolys_reject_nonpositive_scale(small_jacobi):
    with pytest.raises(DomainError):
        multiplicative_charpoly(small_jacobi, 0.0)
    with pytest.raises(DomainError):
        additive_charpoly(small_jacobi, -1.0)
    with pytest.raises(DomainError):
        eigenvalues_multiplicative(small_jacobi, -0.5)


def test_multiplicative_roots_match_dense_eigenvalues(gauss_jacobi, gauss_spec):
    config = eigenvalues_multiplicative(gauss_jacobi, 0.6, spec=gauss_spec)
    _, distance = match_roots(config.z, np.linalg.eigvals(dense_multiplicative(gauss_jacobi, 0.6)))
    assert distance < 1e-8
    assert config.total_count == gauss_jacobi.n
    assert config.kind == PerturbationKind.MULTIPLICATIVE


def test_gaussian_angle_sum_and_half_plane_count():
    spec = EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=1.0, n=10)
    J = sample_jacobi(spec, RngStream(seed=3))
    config = eigenvalues_multiplicative(J, 2.5, spec=spec)
    assert config.angle_sum() == pytest.approx(math.atan(2.5), abs=1e-9)
    assert config.upper_count() == positive_eigenvalue_count(J)


def test_single_realization_lies_in_first_and_third_quadrants():
    spec = EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=2.0, n=30)
    J = sample_jacobi(spec, RngStream(seed=7))
    config = eigenvalues_multiplicative(J, 1.0, spec=spec)
    assert config.size == 30
    assert np.all(config.z.real * config.z.imag > 0)
    assert np.sum(arg_half_period(config.z)) == pytest.approx(math.pi / 4, abs=1e-9)


def test_laguerre_configuration_in_upper_half_plane(laguerre_spec):
    J = sample_jacobi(laguerre_spec, RngStream(seed=21))
    config = eigenvalues_multiplicative(J, 1.3, spec=laguerre_spec)
    assert np.all(config.z.imag > 0)
    assert config.angle_sum() == pytest.approx(math.atan(1.3), abs=1e-9)


def test_rank_deficient_configuration_has_structural_zero(hard_spec):
    J = sample_jacobi(hard_spec, RngStream(seed=4))
    config = eigenvalues_multiplicative(J, 0.9, spec=hard_spec)
    assert config.zero_count == 1
    assert config.size == hard_spec.m
    assert np.all(config.z.imag > 0)
    assert np.sum(np.angle(config.z)) < math.atan(0.9)


def test_additive_configuration(gauss_jacobi, gauss_spec):
    config = eigenvalues_additive(gauss_jacobi, 0.7, spec=gauss_spec)
    assert np.sum(config.z.imag) == pytest.approx(0.7, abs=1e-9)
    assert np.all(config.z.imag > 0)
    _, distance = match_roots(config.z, np.linalg.eigvals(dense_additive(gauss_jacobi, 0.7)))
    assert distance < 1e-8


def test_measure_route_agrees_with_jacobi_route(gauss_jacobi, gauss_spec):
    mu = jacobi_to_measure(gauss_jacobi)
    from_jacobi = eigenvalues_multiplicative(gauss_jacobi, 1.1, spec=gauss_spec)
    from_measure = eigenvalues_from_measure(mu, 1.1, spec=gauss_spec)
    _, distance = match_roots(from_jacobi.z, from_measure.z)
    assert distance < 1e-8
    additive_jacobi = eigenvalues_additive(gauss_jacobi, 1.1)
    additive_measure = eigenvalues_additive_from_measure(mu, 1.1)
    _, distance = match_roots(additive_jacobi.z, additive_measure.z)
    assert distance < 1e-8


def test_rank_deficient_measure_route(hard_spec):
    mu, _ = sample_spectral_data(hard_spec, PointMassLaw(l0=1.0), RngStream(seed=8))
    config = eigenvalues_from_measure(mu, 1.0, spec=hard_spec)
    assert config.zero_count == 1
    assert config.size == hard_spec.m
    with pytest.raises(DomainError):
        eigenvalues_additive_from_measure(mu, 1.0)


def test_forward_map_for_single_atom():
    z = forward_map(np.array([2.0]), np.array([1.0]), 0.5)
    assert z[0] == pytest.approx(2.0 + 1.0j, abs=1e-12)


def test_degree_cap():
    J = JacobiMatrix(b=np.arange(51, dtype=float), a=np.ones(50))
    with pytest.raises(SizeError):
        eigenvalues_multiplicative(J, 1.0)


def test_chiral_spectrum_trivial_case():
    config = EigenConfiguration(z=[4.0 + 0j], l=1.0)
    chiral = chiral_spectrum(config, 1, 1)
    assert sorted(chiral.z.real) == [-2.0, 2.0]
    assert chiral.zero_count == 0


@pytest.mark.parametrize("m, n", [(5, 3), (2, 4)])
def test_chiral_spectrum_counts_and_squares(m, n):
    spec = EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=2.0, n=n, m=m)
    J = sample_jacobi(spec, RngStream(seed=13))
    config = eigenvalues_multiplicative(J, 0.8, spec=spec)
    chiral = chiral_spectrum(config, m, n)
    assert chiral.total_count == m + n
    assert chiral.zero_count == abs(m - n)
    assert chiral.spec.kind == EnsembleKind.CHIRAL
    _, distance = match_roots(np.concatenate([config.z, config.z]), chiral.z ** 2)
    assert distance < 1e-10
    _, distance = match_roots(chiral.z, -chiral.z)
    assert distance < 1e-12


def test_chiral_spectrum_rejects_mismatched_sizes(laguerre_spec):
    J = sample_jacobi(laguerre_spec, RngStream(seed=2))
    config = eigenvalues_multiplicative(J, 1.0, spec=laguerre_spec)
    with pytest.raises(DomainError):
        chiral_spectrum(config, laguerre_spec.m + 1, laguerre_spec.n)


def test_symplectic_double_matches_quaternion_blocks():
    spec = EnsembleSpec(kind=EnsembleKind.GAUSSIAN, beta=4.0, n=5)
    J = sample_jacobi(spec, RngStream(seed=17))
    config = eigenvalues_multiplicative(J, 0.75, spec=spec)
    doubled = symplectic_double(config)
    assert doubled.size == 10
    _, distance = match_roots(doubled.z, np.conj(doubled.z))
    assert distance < 1e-12
    _, distance = match_roots(doubled.z, np.linalg.eigvals(quaternion_block_matrix(J, 0.75)))
    assert distance < 1e-8


def test_symplectic_double_needs_beta_four(gauss_jacobi, gauss_spec):
    config = eigenvalues_multiplicative(gauss_jacobi, 1.0, spec=gauss_spec)
    with pytest.raises(DomainError):
        symplectic_double(config)


def test_quaternion_embedding_is_multiplicative():
    p = Quaternion(q1=1.0, q2=2.0, q3=-0.5, q4=0.25)
    q = Quaternion(q1=-1.5, q2=0.5, q3=1.0, q4=2.0)
    product = Quaternion(
        q1=p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3 - p.q4 * q.q4,
        q2=p.q1 * q.q2 + p.q2 * q.q1 + p.q3 * q.q4 - p.q4 * q.q3,
        q3=p.q1 * q.q3 - p.q2 * q.q4 + p.q3 * q.q1 + p.q4 * q.q2,
        q4=p.q1 * q.q4 + p.q2 * q.q3 - p.q3 * q.q2 + p.q4 * q.q1,
    )
    assert np.allclose(quaternion_embed(p) @ quaternion_embed(q), quaternion_embed(product), atol=1e-12)
    assert np.linalg.det(quaternion_embed(p)).real == pytest.approx(p.norm() ** 2)


def test_full_wishart_zero_count():
    assert full_wishart_zero_count(2, 5) == 3
    assert full_wishart_zero_count(5, 3) == 0
    with pytest.raises(DomainError):
        full_wishart_zero_count(0, 3)


def test_two_by_two_example():
    J = JacobiMatrix(b=[0.0, 0.0], a=[1.0])
    assert positive_eigenvalue_count(J) == 1
    config = eigenvalues_multiplicative(J, 1.0)
    root = np.sqrt(1.0 + 1.0j)
    _, distance = match_roots(np.array([root, -root]), config.z)
    assert distance < 1e-12
    assert np.allclose(config.z ** 2, 1.0 + 1.0j, atol=1e-12)
    assert config.angle_sum() == pytest.approx(math.pi / 4)
    assert config.upper_count() == 1


@pytest.mark.parametrize("b, a, expected", [
    ([0.0, 0.0], [1.0], 1),
    ([0.0, -1.0], [1.0], 1),
    ([0.0, 0.0, 1.0], [1.0, 1.0], 2),
    ([1.0, 0.0, 2.0], [1.0, 1.0], 2),
    ([0.0], [], 0),
])
def test_positive_eigenvalue_count_with_zero_pivots(b, a, expected):
    J = JacobiMatrix(b=b, a=a)
    assert positive_eigenvalue_count(J) == expected
    eigenvalues = np.linalg.eigvalsh(J.to_dense())
    assert expected == np.count_nonzero(eigenvalues > 1e-12)
