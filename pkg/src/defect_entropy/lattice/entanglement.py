"""Entropies of a Gaussian fermionic state from its correlation eigenvalues.

Charge-resolved quantities come from the generating polynomial

    prod_i [(1 - l_i)^n + l_i^n x]

whose x^q coefficient is the symmetry-resolved partition function Z_n(q).
"""

import numpy as np
from scipy.special import expit, xlogy

from defect_entropy.entities.spectra import CorrelationMatrix, EntanglementSpectrum
from defect_entropy.entities.tables import EMPTY_SECTOR_THRESHOLD, ChargeResolvedTable
from defect_entropy.numerics.linalg import binary_entropy, clamp_unit_interval, eigh_symmetric

LAMBDA_CLAMP = 1e-10


def _as_lambdas(lambdas: np.ndarray, tolerance: float = LAMBDA_CLAMP) -> np.ndarray:
    return clamp_unit_interval(np.atleast_1d(np.asarray(lambdas, dtype=float)), tolerance)


def _check_index(n: float) -> None:
    if not n > 0:
        raise ValueError(f"Renyi index must be positive, got {n}")


def correlation_spectrum(corr: CorrelationMatrix, tolerance: float = LAMBDA_CLAMP) -> EntanglementSpectrum:
    lambdas = eigh_symmetric(corr.entries).eigenvalues
    return EntanglementSpectrum.from_lambdas(clamp_unit_interval(lambdas, tolerance))


def total_renyi(lambdas: np.ndarray, n: float) -> float:
    _check_index(n)
    if n == 1:
        raise ValueError("n = 1 is the von Neumann limit, use total_vn")
    lam = _as_lambdas(lambdas)
    return float(np.sum(np.log(lam**n + (1.0 - lam) ** n)) / (1.0 - n))


def total_vn(lambdas: np.ndarray) -> float:
    return float(np.sum(binary_entropy(_as_lambdas(lambdas))))


def charged_moment(lambdas: np.ndarray, n: float, alpha: float) -> complex:
    """Z_n(alpha) = prod_i (l_i^n e^{i alpha} + (1 - l_i)^n), summed in log space."""
    _check_index(n)
    lam = _as_lambdas(lambdas)
    factors = lam**n * np.exp(1j * alpha) + (1.0 - lam) ** n
    if np.any(factors == 0):
        return 0j
    return complex(np.exp(np.sum(np.log(factors))))


def charged_moment_from_spectrum(epsilons: np.ndarray, n: float, alpha: float) -> complex:
    return charged_moment(expit(-np.asarray(epsilons, dtype=float)), n, alpha)


def srpf_exact(lambdas: np.ndarray, n: float) -> np.ndarray:
    """Z_n(q) for q = 0 ... len(lambdas)."""
    _check_index(n)
    lam = _as_lambdas(lambdas)
    coefficients = np.ones(1)
    log_scale = 0.0
    for a, b in zip((1.0 - lam) ** n, lam**n):
        coefficients = np.convolve(coefficients, [a, b])
        peak = coefficients.max()
        coefficients /= peak
        log_scale += np.log(peak)
    return coefficients * np.exp(log_scale)


def srpf_with_derivative(lambdas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Z_1(q), G(q)) with G(q) = -d/dn Z_n(q) at n = 1, in one convolution pass."""
    lam = _as_lambdas(lambdas)
    values = np.ones(1)
    derivative = np.zeros(1)
    log_scale = 0.0
    for a, b in zip(1.0 - lam, lam):
        factor = [a, b]
        factor_derivative = [xlogy(a, a), xlogy(b, b)]
        derivative = np.convolve(derivative, factor) + np.convolve(values, factor_derivative)
        values = np.convolve(values, factor)
        peak = values.max()
        values /= peak
        derivative /= peak
        log_scale += np.log(peak)
    scale = np.exp(log_scale)
    return values * scale, -derivative * scale


def srpf_fourier(lambdas: np.ndarray, n: float, points: int = 4096) -> np.ndarray:
    """Z_n(q) by periodic trapezoidal integration of the charged moments over the flux."""
    lam = _as_lambdas(lambdas)
    alphas = -np.pi + 2.0 * np.pi * np.arange(points) / points
    factors = lam**n * np.exp(1j * alphas)[:, None] + (1.0 - lam) ** n
    moments = np.prod(factors, axis=1)
    charges = np.arange(len(lam) + 1)
    kernel = np.exp(-1j * np.outer(charges, alphas))
    return (kernel @ moments).real / points


def charge_resolved_table(
    lambdas: np.ndarray,
    n: float,
    empty_threshold: float = EMPTY_SECTOR_THRESHOLD,
    tolerance: float = LAMBDA_CLAMP,
) -> ChargeResolvedTable:
    _check_index(n)
    lam = _as_lambdas(lambdas, tolerance)
    z_1, g = srpf_with_derivative(lam)
    z_n = z_1 if n == 1 else srpf_exact(lam, n)

    occupied = z_1 > empty_threshold
    vn = np.full(len(z_1), np.nan)
    vn[occupied] = g[occupied] / z_1[occupied] + np.log(z_1[occupied])

    return ChargeResolvedTable.from_sectors(
        n=n,
        q_values=np.arange(len(z_1)),
        z_n_q=z_n,
        z_1_q=z_1,
        sre_vn=vn,
        total_vn=total_vn(lam),
        total_renyi=None if n == 1 else total_renyi(lam, n),
        empty_threshold=empty_threshold,
    )


def sre(table: ChargeResolvedTable, q: int) -> float:
    return table.renyi_at(q)


def sre_vn(table: ChargeResolvedTable, q: int) -> float:
    return table.vn_at(q)


def config_fluct_split(table: ChargeResolvedTable) -> tuple[float, float]:
    occupied = table.occupied
    configuration = float(np.sum(table.z_1_q[occupied] * table.sre_vn[occupied]))
    fluctuation = float(-np.sum(xlogy(table.z_1_q, table.z_1_q)))
    return configuration, fluctuation
