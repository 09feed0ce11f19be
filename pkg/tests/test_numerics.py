import math

import numpy as np
import pytest
from numpy.polynomial import Polynomial
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from betaperturb.common.errors import DomainError
from betaperturb.common.models import JacobiMatrix
from betaperturb.common.numerics import (
    aberth,
    arg_half_period,
    canonical_order,
    log_gamma,
    poly_roots,
    product_values,
    symm_tridiag_eigen,
    tridiagonal_ql,
)


def test_arg_half_period_quadrants():
    assert arg_half_period(1 + 1j) == pytest.approx(math.pi / 4)
    assert arg_half_period(-1 - 1j) == pytest.approx(math.pi / 4)
    assert arg_half_period(-1 + 1j) == pytest.approx(3 * math.pi / 4)
    assert arg_half_period(1 - 1j) == pytest.approx(3 * math.pi / 4)
    assert arg_half_period(2.0) == 0.0
    assert arg_half_period(-2.0) == 0.0


def test_arg_half_period_is_vectorized_and_in_range(rng):
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    angles = arg_half_period(z)
    assert angles.shape == (50,)
    assert np.all((angles >= 0) & (angles < math.pi))
    assert np.allclose(np.exp(2j * angles), (z / np.abs(z)) ** 2)


def test_arg_half_period_rejects_non_finite():
    with pytest.raises(DomainError):
        arg_half_period(complex(np.nan, 1.0))


def test_canonical_order_sorts_by_real_then_imaginary():
    z = np.array([1 + 2j, -1 + 0j, 1 - 1j, 0 + 5j])
    assert list(canonical_order(z)) == [-1 + 0j, 0 + 5j, 1 - 1j, 1 + 2j]


def test_poly_roots_of_real_cubic():
    roots = poly_roots(Polynomial.fromroots([1.0, 2.0, 3.0]))
    assert np.allclose(roots, [1.0, 2.0, 3.0], atol=1e-12)


def test_poly_roots_of_complex_polynomial(rng):
    expected = canonical_order(rng.normal(size=8) + 1j * rng.normal(size=8))
    roots = poly_roots(Polynomial.fromroots(expected))
    assert np.allclose(roots, expected, atol=1e-9)


def test_poly_roots_rejects_constants_and_bad_tolerance():
    with pytest.raises(DomainError):
        poly_roots(Polynomial([3.0]))
    with pytest.raises(DomainError):
        poly_roots(Polynomial([1.0, 1.0]), tol=0.0)


def test_aberth_on_product_form_evaluator(rng):
    expected = canonical_order(rng.uniform(-3, 3, size=12) + 1j * rng.uniform(-3, 3, size=12))
    roots = aberth(lambda z: product_values(expected, z), expected.size, 0j, 6.0)
    assert np.allclose(roots, expected, atol=1e-10)


def test_tridiagonal_ql_matches_scipy(rng):
    d = rng.normal(size=9)
    e = rng.uniform(0.1, 2.0, size=8)
    values, first = tridiagonal_ql(d, e)
    expected_values, vectors = eigh_tridiagonal(d, e)
    assert np.allclose(values, expected_values, atol=1e-12)
    assert np.allclose(first ** 2, vectors[0] ** 2, atol=1e-12)


def test_symm_tridiag_eigen_gives_probability_measure(small_jacobi):
    mu = symm_tridiag_eigen(small_jacobi)
    assert mu.size == 3
    assert math.isclose(float(np.sum(mu.weights)), 1.0, abs_tol=1e-14)
    assert np.allclose(mu.atoms, np.linalg.eigvalsh(small_jacobi.to_dense()), atol=1e-12)
    assert mu.moment(1) == pytest.approx(small_jacobi.b[0], abs=1e-12)


def test_single_entry_jacobi_matrix():
    mu = symm_tridiag_eigen(JacobiMatrix(b=[2.5], a=[]))
    assert list(mu.atoms) == [2.5]
    assert list(mu.weights) == [1.0]


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 7.25, 30.0, 100.0])
def test_log_gamma_matches_scipy(x):
    assert log_gamma(x) == pytest.approx(float(gammaln(x)), rel=1e-12, abs=1e-13)


def test_log_gamma_vectorized_and_domain():
    x = np.array([0.25, 3.0, 12.5])
    assert np.allclose(log_gamma(x), gammaln(x), rtol=1e-12)
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        log_gamma(-1.5)


def test_log_gamma_across_its_range():
    x = np.geomspace(1e-3, 1e6, 200)
    x = x[np.abs(gammaln(x)) > 0.5]
    assert np.allclose(log_gamma(x), gammaln(x), rtol=1e-12, atol=0.0)
    assert log_gamma(1e-3) == pytest.approx(float(gammaln(1e-3)), rel=1e-12)
    assert log_gamma(1e6) == pytest.approx(float(gammaln(1e6)), rel=1e-12)
