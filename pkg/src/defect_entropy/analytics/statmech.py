import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, xlogy

from defect_entropy.entities.cases import ConstrainedState, EquipartitionEntry, GapPosition
from defect_entropy.lattice.entanglement import charge_resolved_table
from defect_entropy.log import logger
from defect_entropy.numerics.linalg import binary_entropy

BRACKET_MARGIN = 40.0
DEGENERACY_TOL = 1e-6
INVARIANCE_FLOOR = 1e-10


def _split_levels(spectrum: np.ndarray) -> tuple[np.ndarray, int]:
    spectrum = np.asarray(spectrum, dtype=float)
    return spectrum[np.isfinite(spectrum)], int(np.sum(spectrum == -np.inf))


def occupations(spectrum: np.ndarray, mu: float) -> np.ndarray:
    """Fermi factors 1 / (e^{eps - mu} + 1); -inf levels are full and +inf levels empty."""
    return expit(mu - np.asarray(spectrum, dtype=float))


def solve_mu(spectrum: np.ndarray, q_target: float) -> float:
    levels, frozen = _split_levels(spectrum)
    target = q_target - frozen
    if not 0 < target < len(levels):
        raise ValueError(
            f"Charge {q_target} unreachable with {len(levels)} finite and {frozen} filled levels"
        )
    return float(
        brentq(
            lambda mu: np.sum(expit(mu - levels)) - target,
            levels.min() - BRACKET_MARGIN,
            levels.max() + BRACKET_MARGIN,
            xtol=1e-14,
            rtol=4 * np.finfo(float).eps,
            maxiter=200,
        )
    )


def constrained_state(spectrum: np.ndarray, q_target: float) -> ConstrainedState:
    spectrum = np.asarray(spectrum, dtype=float)
    return ConstrainedState(spectrum=spectrum, q_target=q_target, mu=solve_mu(spectrum, q_target))


def constrained_entropy(spectrum: np.ndarray, mu: float) -> float:
    levels, _ = _split_levels(spectrum)
    return float(np.sum(binary_entropy(expit(mu - levels))))


def two_level_sre_estimate(constrained: float) -> float:
    """S(q) ~ 2 S~ - 3 log 2 when two degenerate levels sit at mu."""
    return 2.0 * constrained - 3.0 * np.log(2.0)


def _gap_position(levels: np.ndarray, mu: float, tolerance: float) -> GapPosition:
    distances = np.abs(levels - mu)
    if distances.min() > tolerance:
        return GapPosition.GAP
    nearest = levels[np.argmin(distances)]
    if np.sum(np.abs(levels - nearest) < tolerance) > 1:
        return GapPosition.DEGENERATE_LEVEL
    return GapPosition.LEVEL


def equipartition_report(
    spectrum: np.ndarray,
    q_range: list[int] | range,
    degeneracy_tol: float = DEGENERACY_TOL,
    invariance_floor: float = INVARIANCE_FLOOR,
) -> list[EquipartitionEntry]:
    """For each charge, the chemical potential that pins it and what that implies.

    The exact sector entropies come from the mu-shifted occupations and are
    checked against the mu = 0 ones, since mu rescales every state of a
    sector by the same factor.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    levels, _ = _split_levels(spectrum)
    reference = charge_resolved_table(occupations(spectrum, 0.0), 1.0)

    entries = []
    for q in q_range:
        mu = solve_mu(spectrum, q)
        table = charge_resolved_table(occupations(spectrum, mu), 1.0)
        constrained = constrained_entropy(spectrum, mu)

        z_1 = table.z_1_q
        occupied = table.occupied
        decomposition = float(np.sum(z_1[occupied] * table.sre_vn[occupied]) - np.sum(xlogy(z_1, z_1)))

        comparable = (z_1 > invariance_floor) & (reference.z_1_q > invariance_floor)
        invariance = float(
            np.max(np.abs(table.sre_vn[comparable] - reference.sre_vn[comparable]), initial=0.0)
        )
        entries.append(
            EquipartitionEntry(
                q=q,
                mu=mu,
                constrained_entropy=constrained,
                sector_probability=table.probability(q),
                reconstructed_sre=table.vn_at(q),
                gap_position=_gap_position(levels, mu, degeneracy_tol),
                decomposition_residual=abs(decomposition - constrained),
                mu_invariance_residual=invariance,
            )
        )
    logger.debug(f"equipartition_report. {len(entries)} sectors over {len(levels)} finite levels")
    return entries
