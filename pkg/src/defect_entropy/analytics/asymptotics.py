"""Closed-form predictions for charge-resolved entanglement of SSH intervals.

Two regimes are covered:
  - delta = 1, where every interval decouples into dimers and the tables are exact;
  - 0 < delta < 1 with l >> xi, where each interval boundary contributes a
    theta-function factor and the results are exact up to e^{-l/xi} corrections.
"""

import numpy as np
from scipy.special import expit

from defect_entropy.entities.cases import AsymptoticParams, BondKind, CaseKind, WindowCase
from defect_entropy.entities.tables import ChargeResolvedTable
from defect_entropy.numerics.linalg import binary_entropy
from defect_entropy.numerics.specialfn import modulus_from_nome, theta2, theta3

DELTA_Q_CUTOFF = 12
RICHARDSON_STEP = 1e-3
LOG4 = np.log(4.0)


def excess_entropy(p: float, n: float) -> float:
    """Extra entropy of a hybridized zero mode cut by a fully dimerized interval."""
    if n == 1:
        return binary_entropy(p)
    return float(np.log((1.0 - p) ** n + p**n) / (1.0 - n))


def dimerized_table(case: CaseKind, ell: int, n: float, p: float | None = None) -> ChargeResolvedTable:
    """Exact delta = 1 table; `p` selects the hybridized zero mode in a defect window."""
    if p is not None and case != CaseKind.DEFECT:
        raise ValueError(f"A zero mode only enters defect windows, not {case}")
    q_values = np.arange(2 * ell + 1)
    z_n = np.zeros(len(q_values))
    z_1 = np.zeros(len(q_values))
    vn = np.zeros(len(q_values))

    match case:
        case CaseKind.TRIVIAL:
            z_n[ell] = z_1[ell] = 1.0
        case CaseKind.TOPOLOGICAL:
            z_n[[ell - 1, ell + 1]] = 2.0 ** (-2 * n)
            z_n[ell] = 2.0 ** (1 - 2 * n)
            z_1[[ell - 1, ell + 1]] = 0.25
            z_1[ell] = 0.5
            vn[ell] = np.log(2.0)
        case CaseKind.DEFECT if p is None:
            z_n[[ell - 1, ell]] = 2.0 ** (-n)
            z_1[[ell - 1, ell]] = 0.5
        case CaseKind.DEFECT:
            z_n[ell - 1] = p**n / 2.0**n
            z_n[ell] = ((1.0 - p) ** n + p**n) / 2.0**n
            z_n[ell + 1] = (1.0 - p) ** n / 2.0**n
            z_1[[ell - 1, ell, ell + 1]] = [p / 2.0, 0.5, (1.0 - p) / 2.0]
            vn[ell] = binary_entropy(p)

    return ChargeResolvedTable.from_sectors(n=n, q_values=q_values, z_n_q=z_n, z_1_q=z_1, sre_vn=vn)


def replica_modulus(n: float, params: AsymptoticParams) -> tuple[float, float]:
    """(k_n, k_n') whose nome is exp(-n epsilon)."""
    return modulus_from_nome(np.exp(-n * params.epsilon))


def _log_prefactor(case: CaseKind, n: float, params: AsymptoticParams) -> float:
    log_k, log_kp = np.log(params.k), np.log(params.k_prime)
    k_n, k_n_prime = replica_modulus(n, params)
    base = -(n - 1) / 3 * LOG4 - np.log(k_n * k_n_prime) / 3
    match case:
        case CaseKind.TOPOLOGICAL:
            return base + n * (log_kp - 2 * log_k) / 3
        case CaseKind.TRIVIAL:
            return base + n * (log_k + log_kp) / 3
        case CaseKind.DEFECT:
            return base + n * (log_kp - 0.5 * log_k) / 3


def boundary_moment(bond: BondKind, n: float, alpha: float, params: AsymptoticParams) -> complex:
    """Contribution of a single cut bond to Z_n(alpha), defined up to a phase."""
    zeta = np.exp(-n * params.epsilon)
    k, k_prime = params.k, params.k_prime
    k_n, k_n_prime = replica_modulus(n, params)
    scale = 2.0 ** (-(n - 1) / 3)
    if bond == BondKind.STRONG:
        ratio = (k_prime**n / (k_n * k_n_prime * k ** (2 * n))) ** (1 / 6)
        return complex(scale * ratio * theta2(alpha / 2, zeta) / theta3(0.0, zeta))
    ratio = ((k * k_prime) ** n / (k_n * k_n_prime)) ** (1 / 6)
    return complex(scale * ratio * theta3(alpha / 2, zeta) / theta3(0.0, zeta))


def charged_moment_asymptotic(
    case: CaseKind,
    n: float,
    alpha: float,
    ell: int,
    params: AsymptoticParams,
    p: float | None = None,
) -> complex:
    zeta = np.exp(-n * params.epsilon)
    magnitude = np.exp(_log_prefactor(case, n, params)) / theta3(0.0, zeta) ** 2
    match case:
        case CaseKind.TOPOLOGICAL:
            value = np.exp(1j * alpha * ell) * magnitude * theta2(alpha / 2, zeta) ** 2
        case CaseKind.TRIVIAL:
            value = np.exp(1j * alpha * ell) * magnitude * theta3(alpha / 2, zeta) ** 2
        case CaseKind.DEFECT:
            value = (
                np.exp(1j * alpha * (ell - 0.5))
                * magnitude
                * theta2(alpha / 2, zeta)
                * theta3(alpha / 2, zeta)
            )
    if p is not None:
        value *= p**n + (1.0 - p) ** n * np.exp(1j * alpha)
    return complex(value)


def _srpf_without_zero_mode(case: CaseKind, n: float, delta_q: int, params: AsymptoticParams) -> float:
    eps = params.epsilon
    log_value = _log_prefactor(case, n, params) - 2 * np.log(theta3(0.0, np.exp(-n * eps)))
    if case == CaseKind.DEFECT:
        log_value += -0.5 * n * eps * (delta_q + 0.5) ** 2 - 0.5 * LOG4
        return float(np.exp(log_value) * theta2(0.0, np.exp(-n * eps / 2)))

    odd = delta_q % 2 == 1
    parity_theta = theta3 if odd == (case == CaseKind.TOPOLOGICAL) else theta2
    log_value += -0.5 * n * eps * delta_q**2
    return float(np.exp(log_value) * parity_theta(0.0, np.exp(-2 * n * eps)))


def srpf_asymptotic(
    case: CaseKind,
    n: float,
    delta_q: int,
    params: AsymptoticParams,
    p: float | None = None,
) -> float:
    """Z_n(l + delta_q) of an interval of the given case."""
    if p is None:
        return _srpf_without_zero_mode(case, n, delta_q, params)
    if case != CaseKind.DEFECT:
        raise ValueError(f"A zero mode only enters defect windows, not {case}")
    return p**n * _srpf_without_zero_mode(case, n, delta_q, params) + (
        1.0 - p
    ) ** n * _srpf_without_zero_mode(case, n, delta_q - 1, params)


def zero_mode_level(p: float) -> float:
    """epsilon_zero = log(p / (1 - p)); +inf when the zero mode is empty in the window."""
    with np.errstate(divide="ignore"):
        return float(np.log(p) - np.log1p(-p))


def crossing_p(delta_q: int, params: AsymptoticParams) -> float:
    """Hybridization at which epsilon_zero is degenerate with epsilon * delta_q."""
    return float(expit(params.epsilon * delta_q))


def _zero_mode_offset(p: float, delta_q: int, params: AsymptoticParams) -> float:
    return zero_mode_level(p) - params.epsilon * delta_q


def excess_entropy_asymptotic(p: float, n: float, delta_q: int, params: AsymptoticParams) -> float:
    """Sector excess of a hybridized zero mode on top of the empty-mode defect SRE."""
    if p in (0.0, 1.0):
        return 0.0
    x = _zero_mode_offset(p, delta_q, params)
    if n == 1:
        return binary_entropy(expit(-x))
    return float((np.logaddexp(0.0, n * x) - n * np.logaddexp(0.0, x)) / (1.0 - n))


def _sigma(n: float, params: AsymptoticParams) -> float:
    eps = params.epsilon
    k_n, k_n_prime = replica_modulus(n, params)
    moduli = (n * np.log(params.k * params.k_prime) - (n - 1) * LOG4 - np.log(k_n * k_n_prime)) / 3
    thetas = 2 * n * np.log(theta3(0.0, np.exp(-eps))) - 2 * np.log(theta3(0.0, np.exp(-n * eps)))
    return float((thetas + moduli) / (1.0 - n))


def sre_asymptotic(
    case: CaseKind,
    n: float,
    delta_q: int,
    params: AsymptoticParams,
    p: float | None = None,
) -> float:
    """Renyi SRE S_n(l + delta_q) from the sigma_n closed forms (n != 1)."""
    if n == 1:
        raise ValueError("n = 1 is the von Neumann limit, use sre_vn_asymptotic")
    eps = params.epsilon
    if case == CaseKind.DEFECT:
        term = (n - 1) * np.log(2.0) + np.log(theta2(0.0, np.exp(-n * eps / 2))) - n * np.log(
            theta2(0.0, np.exp(-eps / 2))
        )
    else:
        odd = delta_q % 2 == 1
        parity_theta = theta3 if odd == (case == CaseKind.TOPOLOGICAL) else theta2
        term = np.log(parity_theta(0.0, np.exp(-2 * n * eps))) - n * np.log(
            parity_theta(0.0, np.exp(-2 * eps))
        )
    value = _sigma(n, params) + term / (1.0 - n)
    if p is not None:
        if case != CaseKind.DEFECT:
            raise ValueError(f"A zero mode only enters defect windows, not {case}")
        value += excess_entropy_asymptotic(p, n, delta_q, params)
    return float(value)


def _log_ratio(case: CaseKind, n: float, delta_q: int, params: AsymptoticParams) -> float:
    return np.log(_srpf_without_zero_mode(case, n, delta_q, params)) - n * np.log(
        _srpf_without_zero_mode(case, 1.0, delta_q, params)
    )


def sre_vn_asymptotic(
    case: CaseKind,
    delta_q: int,
    params: AsymptoticParams,
    p: float | None = None,
    step: float = RICHARDSON_STEP,
) -> float:
    """Von Neumann SRE: -d/dn log(Z_n / Z_1^n) at n = 1, Richardson-extrapolated."""

    def central(h: float) -> float:
        return (_log_ratio(case, 1 + h, delta_q, params) - _log_ratio(case, 1 - h, delta_q, params)) / (2 * h)

    value = -(4 * central(step / 2) - central(step)) / 3
    if p is not None:
        if case != CaseKind.DEFECT:
            raise ValueError(f"A zero mode only enters defect windows, not {case}")
        value += excess_entropy_asymptotic(p, 1.0, delta_q, params)
    return float(value)


def asymptotic_table(
    window_case: WindowCase,
    n: float,
    cutoff: int = DELTA_Q_CUTOFF,
) -> ChargeResolvedTable:
    case, ell, params, p = window_case.case, window_case.ell, window_case.params, window_case.zero_mode_p
    delta_qs = [dq for dq in range(-cutoff, cutoff + 1) if 0 <= ell + dq <= 2 * ell]
    z_1 = np.array([srpf_asymptotic(case, 1.0, dq, params, p) for dq in delta_qs])
    z_n = z_1 if n == 1 else np.array([srpf_asymptotic(case, n, dq, params, p) for dq in delta_qs])
    vn = np.array([sre_vn_asymptotic(case, dq, params, p) for dq in delta_qs])
    total_renyi = None
    if n != 1:
        total_renyi = float(np.log(charged_moment_asymptotic(case, n, 0.0, ell, params, p).real) / (1.0 - n))
    return ChargeResolvedTable.from_sectors(
        n=n,
        q_values=np.array([ell + dq for dq in delta_qs]),
        z_n_q=z_n,
        z_1_q=z_1,
        sre_vn=vn,
        total_renyi=total_renyi,
    )


def zero_mode_table(p: float, n: float, params: AsymptoticParams, ell: int) -> ChargeResolvedTable:
    return asymptotic_table(WindowCase(case=CaseKind.DEFECT, ell=ell, params=params, zero_mode_p=p), n)


def defect_spectrum(params: AsymptoticParams, count: int, cut: BondKind | None = None) -> np.ndarray:
    """Pseudo-energies of a single boundary, truncated symmetrically.

    `cut=None` is the defect interval (l eps), STRONG gives 2 l eps and WEAK
    gives (2l - 1) eps.
    """
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    eps = params.epsilon
    if cut == BondKind.WEAK:
        return (2 * np.arange(-count + 1, count + 1) - 1) * eps
    levels = np.arange(-count, count + 1) * eps
    return 2 * levels if cut == BondKind.STRONG else levels


def bulk_spectrum(params: AsymptoticParams, ell: int) -> np.ndarray:
    """Defect interval levels eps (l - ell), l = 1 ... 2 ell - 1."""
    return params.epsilon * (np.arange(1, 2 * ell) - ell)


def _balanced_truncation(levels: np.ndarray, size: int) -> np.ndarray:
    magnitudes = np.unique(np.abs(levels))
    kept: list[float] = []
    for magnitude in magnitudes:
        group = levels[np.isclose(np.abs(levels), magnitude)]
        room = size - len(kept)
        if room <= 0:
            break
        if len(group) <= room:
            kept.extend(group)
            continue
        negative = [level for level in group if level < 0][: room // 2]
        positive = [level for level in group if level >= 0][: room - len(negative)]
        kept.extend(negative + positive)
    return np.sort(np.array(kept))


def interval_spectrum(
    case: CaseKind, params: AsymptoticParams, ell: int, p: float | None = None
) -> np.ndarray:
    """The 2 ell pseudo-energies of a finite interval built from its two boundaries.

    A defect interval carries the bulk levels plus epsilon_zero (+inf when the
    zero mode is empty in the window).
    """
    if case == CaseKind.DEFECT:
        zero = np.inf if p is None else zero_mode_level(p)
        return np.sort(np.append(bulk_spectrum(params, ell), zero))
    if p is not None:
        raise ValueError(f"A zero mode only enters defect windows, not {case}")
    cut = BondKind.STRONG if case == CaseKind.TOPOLOGICAL else BondKind.WEAK
    edge = defect_spectrum(params, ell, cut)
    return _balanced_truncation(np.concatenate([edge, edge]), 2 * ell)
