"""Complete elliptic integrals, Jacobi theta functions and the nome/modulus map.

Theta conventions:

    theta2(w|z) = sum_m exp(i(2m+1)w) z^((m+1/2)^2)
    theta3(w|z) = sum_m exp(2imw) z^(m^2)
    theta4(w|z) = sum_m (-1)^m exp(2imw) z^(m^2)

with theta_j(z) = theta_j(0|z). A dimerization delta maps to the modulus
k = (1-delta)/(1+delta) and the level spacing epsilon = pi I(k')/I(k); the
nome of the n-th Renyi replica is exp(-n epsilon).
"""

import numpy as np
from scipy.optimize import brentq
from scipy.special import ellipk, ellipkm1

from defect_entropy.entities.cases import AsymptoticParams

MAX_NOME = 0.999
# ln(1e17): terms below exp(-SERIES_DEPTH) of the leading one are dropped
SERIES_DEPTH = 39.2
SMALLEST_MODULUS = 1e-150


def elliptic_I(k: float) -> float:
    """I(k) = int_0^1 dx / sqrt((1-x^2)(1-k^2 x^2))."""
    if not 0 <= k < 1:
        raise ValueError(f"elliptic_I needs 0 <= k < 1, got {k}")
    return float(ellipk(k * k))


def elliptic_I_complement(k: float) -> float:
    """I(k') for k' = sqrt(1-k^2), accurate for small k."""
    if not 0 < k <= 1:
        raise ValueError(f"elliptic_I_complement needs 0 < k <= 1, got {k}")
    return float(ellipkm1(k * k))


def _check_nome(zeta: float) -> None:
    if not 0 <= zeta < 1:
        raise ValueError(f"Theta series diverge for nome {zeta}")
    if zeta > MAX_NOME:
        raise ValueError(f"Nome {zeta} above {MAX_NOME}: series too slow to be trusted")


def _series_length(zeta: float) -> int:
    return int(np.ceil(np.sqrt(SERIES_DEPTH / -np.log(zeta)))) + 2


def _as_output(values: np.ndarray) -> np.ndarray | float:
    return values if values.ndim else float(values)


def theta2(omega: float | np.ndarray, zeta: float) -> np.ndarray | float:
    _check_nome(zeta)
    omega = np.asarray(omega, dtype=float)
    if zeta == 0:
        return _as_output(np.zeros_like(omega))
    m = np.arange(_series_length(zeta))
    weights = np.exp((m + 0.5) ** 2 * np.log(zeta))
    terms = np.cos(np.multiply.outer(omega, 2 * m + 1)) * weights
    return _as_output(2.0 * terms.sum(axis=-1))


def theta3(omega: float | np.ndarray, zeta: float) -> np.ndarray | float:
    _check_nome(zeta)
    omega = np.asarray(omega, dtype=float)
    if zeta == 0:
        return _as_output(np.ones_like(omega))
    m = np.arange(1, _series_length(zeta))
    weights = np.exp(m**2 * np.log(zeta))
    terms = np.cos(np.multiply.outer(omega, 2 * m)) * weights
    return _as_output(1.0 + 2.0 * terms.sum(axis=-1))


def theta4(omega: float | np.ndarray, zeta: float) -> np.ndarray | float:
    _check_nome(zeta)
    omega = np.asarray(omega, dtype=float)
    if zeta == 0:
        return _as_output(np.ones_like(omega))
    m = np.arange(1, _series_length(zeta))
    weights = (-1.0) ** m * np.exp(m**2 * np.log(zeta))
    terms = np.cos(np.multiply.outer(omega, 2 * m)) * weights
    return _as_output(1.0 + 2.0 * terms.sum(axis=-1))


def _product_powers(zeta: float) -> np.ndarray:
    count = int(np.ceil(SERIES_DEPTH / (-2.0 * np.log(zeta)))) + 2
    return np.arange(1, count + 1)


def euler_product(zeta: float) -> float:
    """prod_{l>=1} (1 - zeta^(2l))."""
    _check_nome(zeta)
    if zeta == 0:
        return 1.0
    l = _product_powers(zeta)
    return float(np.prod(1.0 - zeta ** (2 * l)))


def theta2_product(omega: float | np.ndarray, zeta: float) -> np.ndarray | float:
    _check_nome(zeta)
    omega = np.asarray(omega, dtype=float)
    if zeta == 0:
        return _as_output(np.zeros_like(omega))
    l = _product_powers(zeta)
    cos2 = np.cos(2.0 * omega)[..., None]
    factors = (1.0 - zeta ** (2 * l)) * (1.0 + 2.0 * cos2 * zeta ** (2 * l) + zeta ** (4 * l))
    return _as_output(2.0 * zeta**0.25 * np.cos(omega) * np.prod(factors, axis=-1))


def theta3_product(omega: float | np.ndarray, zeta: float) -> np.ndarray | float:
    _check_nome(zeta)
    omega = np.asarray(omega, dtype=float)
    if zeta == 0:
        return _as_output(np.ones_like(omega))
    l = _product_powers(zeta)
    cos2 = np.cos(2.0 * omega)[..., None]
    factors = (1.0 - zeta ** (2 * l)) * (
        1.0 + 2.0 * cos2 * zeta ** (2 * l - 1) + zeta ** (4 * l - 2)
    )
    return _as_output(np.prod(factors, axis=-1))


def level_spacing(k: float) -> float:
    """pi I(k') / I(k), strictly decreasing from +inf (k -> 0) to 0 (k -> 1)."""
    return float(np.pi * ellipkm1(k * k) / ellipk(k * k))


def _invert_spacing(target: float) -> float:
    # only called with target >= pi, i.e. k <= 1/sqrt(2)
    upper = 1.0 / np.sqrt(2.0)
    if target >= level_spacing(SMALLEST_MODULUS):
        # leading term of k = 4 sqrt(nome) + ...
        return 4.0 * np.exp(-0.5 * target)
    return brentq(
        lambda k: level_spacing(k) - target,
        SMALLEST_MODULUS,
        upper,
        xtol=1e-300,
        rtol=4 * np.finfo(float).eps,
        maxiter=200,
    )


def nome_modulus(n_epsilon: float) -> tuple[float, float]:
    """Solve n_epsilon = pi I(k_n')/I(k_n) for (k_n, k_n')."""
    if not n_epsilon > 0:
        raise ValueError(f"nome_modulus needs n_epsilon > 0, got {n_epsilon}")
    if n_epsilon >= np.pi:
        k = _invert_spacing(n_epsilon)
        return k, float(np.sqrt((1.0 - k) * (1.0 + k)))
    # I(k')/I(k) -> I(k)/I(k') swaps the roles of k and k'
    k_prime = _invert_spacing(np.pi**2 / n_epsilon)
    return float(np.sqrt((1.0 - k_prime) * (1.0 + k_prime))), k_prime


def modulus_from_nome(zeta: float) -> tuple[float, float]:
    """(k, k') = ((theta2/theta3)^2, (theta4/theta3)^2) at nome zeta."""
    t3 = theta3(0.0, zeta)
    return (theta2(0.0, zeta) / t3) ** 2, (theta4(0.0, zeta) / t3) ** 2


def asymptotic_params(delta: float) -> AsymptoticParams:
    if not 0 < delta < 1:
        raise ValueError(f"Asymptotic formulas need 0 < delta < 1, got {delta}")
    k = (1.0 - delta) / (1.0 + delta)
    k_prime = 2.0 * np.sqrt(delta) / (1.0 + delta)
    return AsymptoticParams(delta=delta, k=k, k_prime=k_prime, epsilon=level_spacing(k))


def euler_product_check(zeta: float) -> float:
    """Residual of prod(1 - zeta^(2l)) = [k k' / (4 zeta^(1/2))]^(1/6) theta3(zeta)."""
    if not 0 < zeta < 1:
        raise ValueError(f"euler_product_check needs 0 < zeta < 1, got {zeta}")
    k, k_prime = nome_modulus(-np.log(zeta))
    rhs = (k * k_prime / (4.0 * np.sqrt(zeta))) ** (1.0 / 6.0) * theta3(0.0, zeta)
    return abs(euler_product(zeta) - rhs)
