import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from defect_entropy.numerics.specialfn import (
    asymptotic_params,
    elliptic_I,
    elliptic_I_complement,
    euler_product,
    euler_product_check,
    level_spacing,
    modulus_from_nome,
    nome_modulus,
    theta2,
    theta2_product,
    theta3,
    theta3_product,
    theta4,
)

NOMES = [0.01, 0.1, 0.3, 0.5, 0.7, 0.9]


@pytest.mark.parametrize("k", [0.0, 0.1, 0.5, 0.9, 0.999])
def test_elliptic_I_against_quadrature(k):
    expected, _ = quad(
        lambda theta: 1.0 / np.sqrt(1.0 - (k * np.sin(theta)) ** 2), 0.0, np.pi / 2, epsabs=0.0, epsrel=1e-13, limit=200
    )
    assert elliptic_I(k) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("k", [0.05, 0.2, 0.6])
def test_elliptic_I_complement(k):
    k_prime = np.sqrt(1.0 - k * k)
    expected, _ = quad(
        lambda theta: 1.0 / np.sqrt(1.0 - (k_prime * np.sin(theta)) ** 2), 0.0, np.pi / 2, epsabs=0.0, epsrel=1e-12, limit=200
    )
    assert elliptic_I_complement(k) == pytest.approx(expected, rel=1e-8)


def test_elliptic_I_domain():
    assert elliptic_I(0.0) == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        elliptic_I(1.0)
    with pytest.raises(ValueError):
        elliptic_I_complement(0.0)


@pytest.mark.parametrize("zeta", NOMES)
def test_series_match_products(zeta):
    omegas = np.linspace(-np.pi, np.pi, 13)
    assert_allclose(theta2(omegas, zeta), theta2_product(omegas, zeta), atol=1e-12)
    assert_allclose(theta3(omegas, zeta), theta3_product(omegas, zeta), atol=1e-12)


@pytest.mark.parametrize("zeta", NOMES)
def test_jacobi_quartic_identity(zeta):
    assert theta3(0.0, zeta) ** 4 == pytest.approx(theta2(0.0, zeta) ** 4 + theta4(0.0, zeta) ** 4, rel=1e-12)


@pytest.mark.parametrize("zeta", NOMES)
def test_theta4_is_shifted_theta3(zeta):
    omegas = np.linspace(0.0, np.pi, 5)
    assert_allclose(theta4(omegas, zeta), theta3(omegas + np.pi / 2, zeta), atol=1e-12)


@pytest.mark.parametrize("zeta", NOMES[:-1])
def test_euler_product_identity(zeta):
    assert euler_product_check(zeta) <= 1e-10


def test_euler_product_small_nome():
    assert euler_product(0.0) == 1.0
    assert euler_product(0.1) == pytest.approx(np.prod(1 - 0.1 ** (2 * np.arange(1, 40))))


@pytest.mark.parametrize("n_epsilon", [0.2, 1.0, np.pi, 3.78, 7.5, 30.0])
def test_nome_round_trip(n_epsilon):
    k, k_prime = nome_modulus(n_epsilon)
    assert k**2 + k_prime**2 == pytest.approx(1.0, abs=1e-14)
    assert level_spacing(k) == pytest.approx(n_epsilon, rel=1e-10)
    k_back, k_prime_back = modulus_from_nome(np.exp(-n_epsilon))
    assert k_back == pytest.approx(k, abs=1e-10)
    assert k_prime_back == pytest.approx(k_prime, abs=1e-10)


def test_level_spacing_is_decreasing():
    spacings = [level_spacing(k) for k in (0.01, 0.2, 0.5, 0.8, 0.99)]
    assert (np.diff(spacings) < 0).all()
    assert level_spacing(1 / np.sqrt(2)) == pytest.approx(np.pi)


def test_asymptotic_params():
    params = asymptotic_params(0.3)
    assert params.k == pytest.approx(0.7 / 1.3)
    assert params.k**2 + params.k_prime**2 == pytest.approx(1.0)
    assert params.epsilon == pytest.approx(level_spacing(0.7 / 1.3))
    assert params.localization_length == pytest.approx(1.6154, abs=1e-4)
    assert asymptotic_params(0.5).epsilon > params.epsilon
    with pytest.raises(ValueError):
        asymptotic_params(1.0)


@pytest.mark.parametrize("zeta", [-0.1, 1.0, 0.9995])
def test_invalid_nome(zeta):
    with pytest.raises(ValueError):
        theta3(0.0, zeta)


def test_zero_nome():
    assert theta2(0.3, 0.0) == 0.0
    assert theta3(0.3, 0.0) == 1.0
