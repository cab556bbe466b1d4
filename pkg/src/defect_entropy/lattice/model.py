import numpy as np

from defect_entropy.entities.cases import CaseKind
from defect_entropy.entities.chain import Boundary, ChainSpec, DefectKind
from defect_entropy.entities.spectra import Window
from defect_entropy.errors import WindowError


def localization_length(delta: float) -> float:
    """xi = 1 / (2 artanh|delta|) in cells."""
    delta = abs(delta)
    if delta == 0:
        return float("inf")
    if delta == 1:
        return 0.0
    return float(1.0 / (2.0 * np.arctanh(delta)))


def dispersion(momenta: np.ndarray, hopping: float, delta: float) -> np.ndarray:
    momenta = np.asarray(momenta, dtype=float)
    return 2.0 * hopping * np.sqrt(np.cos(momenta / 2) ** 2 + delta**2 * np.sin(momenta / 2) ** 2)


def band_gap(hopping: float, delta: float) -> float:
    return 4.0 * hopping * abs(delta)


def flip_bonds(spec: ChainSpec) -> list[int]:
    """1-based bond index at which each defect reverses the dimerization.

    Bond b joins sites b and b+1. The flip bond f is picked so that bonds f-1
    and f are both weak for a one-site defect and both strong for a three-site
    defect; site f is the defect centre.
    """
    sign = 1
    flips = []
    for defect in spec.defects:
        j = defect.cell_index
        one_site = defect.kind == DefectKind.ONE_SITE
        flips.append(2 * j if one_site == (sign > 0) else 2 * j + 1)
        sign = -sign
    # bond N is the periodic wrap; an open chain ends at bond N - 1
    last_bond = spec.n_sites if spec.boundary == Boundary.PERIODIC else spec.n_sites - 1
    if flips and flips[-1] > last_bond:
        raise ValueError(
            f"Defect at cell {spec.defects[-1].cell_index} falls off the {spec.boundary} chain"
            f" (flip bond {flips[-1]} > {last_bond})"
        )
    return flips


def defect_sites(spec: ChainSpec) -> list[int]:
    return flip_bonds(spec)


def bond_signs(spec: ChainSpec) -> np.ndarray:
    """Dimerization sign of bonds 1..N (entry b-1 belongs to bond b)."""
    signs = np.ones(spec.n_sites, dtype=int)
    for flip in flip_bonds(spec):
        signs[flip - 1 :] *= -1
    return signs


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    n = spec.n_sites
    signs = bond_signs(spec)
    bonds = np.arange(1, n + 1)
    # even bonds are inter-cell, odd bonds intra-cell
    strength = np.where(bonds % 2 == 0, 1.0 + signs * spec.delta, 1.0 - signs * spec.delta)
    amplitudes = -spec.hopping * strength

    last_bond = n if spec.boundary == Boundary.PERIODIC else n - 1
    rows = bonds[:last_bond] - 1
    cols = bonds[:last_bond] % n

    hamiltonian = np.zeros((n, n))
    hamiltonian[rows, cols] = amplitudes[:last_bond]
    hamiltonian[cols, rows] = amplitudes[:last_bond]
    return hamiltonian


def check_window(spec: ChainSpec, window: Window) -> None:
    if window.stop > spec.n_cells:
        raise WindowError(
            f"Window [{window.start}, {window.stop}] exceeds the chain of {spec.n_cells} cells"
        )


def defects_in_window(spec: ChainSpec, window: Window) -> list[int]:
    first, last = 2 * window.start - 1, 2 * window.stop
    return [site for site in defect_sites(spec) if first <= site <= last]


def classify_window(spec: ChainSpec, window: Window) -> CaseKind:
    check_window(spec, window)
    inside = defects_in_window(spec, window)
    if len(inside) > 1:
        raise WindowError(f"Window [{window.start}, {window.stop}] contains {len(inside)} defects")
    if inside:
        return CaseKind.DEFECT
    local_sign = bond_signs(spec)[2 * window.start - 2]
    return CaseKind.TOPOLOGICAL if local_sign * spec.delta > 0 else CaseKind.TRIVIAL
