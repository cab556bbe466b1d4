import numpy as np

from defect_entropy.entities.chain import Boundary, ChainSpec
from defect_entropy.entities.spectra import (
    CorrelationMatrix,
    EigenSystem,
    Filling,
    OccupationPolicy,
    Window,
    ZeroModePair,
)
from defect_entropy.errors import WindowError, ZeroModeCountError
from defect_entropy.lattice.model import check_window, defect_sites, defects_in_window
from defect_entropy.log import logger

NEAR_ZERO_THRESHOLD = 1e-4
IMAGINARY_TOL = 1e-10


def near_zero_indices(eig: EigenSystem, spec: ChainSpec, threshold: float = NEAR_ZERO_THRESHOLD) -> np.ndarray:
    return np.flatnonzero(np.abs(eig.eigenvalues) < threshold * spec.hopping)


def _anchor_sites(spec: ChainSpec) -> tuple[int, int]:
    if len(spec.defects) == 2:
        first, second = defect_sites(spec)
        return first, second
    if spec.boundary == Boundary.OPEN and not spec.defects:
        return 1, spec.n_sites
    raise ValueError("Localized zero modes need two defects, or an open chain without defects")


def _closer_to_first(spec: ChainSpec, anchors: tuple[int, int]) -> np.ndarray:
    sites = np.arange(1, spec.n_sites + 1)
    d1 = np.abs(sites - anchors[0])
    d2 = np.abs(sites - anchors[1])
    if spec.boundary == Boundary.PERIODIC:
        d1 = np.minimum(d1, spec.n_sites - d1)
        d2 = np.minimum(d2, spec.n_sites - d2)
    return d1 < d2


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    pivot = np.argmax(np.abs(vector))
    return vector if vector[pivot] >= 0 else -vector


def localized_zero_modes(
    eig: EigenSystem, spec: ChainSpec, threshold: float = NEAR_ZERO_THRESHOLD
) -> ZeroModePair:
    """Rotate the near-zero pair so that psi1 sits on defect 1 and psi2 on defect 2.

    The rotation maximizes the weight of psi1 on the half-chain around defect 1,
    which is the top eigenvector of the 2x2 weight matrix of that half-chain.
    """
    indices = near_zero_indices(eig, spec, threshold)
    if len(indices) != 2:
        logger.error(f"localized_zero_modes. Found {len(indices)} near-zero modes")
        raise ZeroModeCountError(len(indices), threshold)

    pair = eig.eigenvectors[:, indices]
    region = _closer_to_first(spec, _anchor_sites(spec))
    weight = pair[region].T @ pair[region]
    _, rotation = np.linalg.eigh(weight)

    psi1 = _fix_sign(pair @ rotation[:, 1])
    psi2 = _fix_sign(pair @ rotation[:, 0])
    energies = (float(eig.eigenvalues[indices[0]]), float(eig.eigenvalues[indices[1]]))
    return ZeroModePair(psi1=psi1, psi2=psi2, energies=energies)


class GroundState:
    """Filled Fermi sea of a chain under an occupation policy."""

    def __init__(
        self,
        spec: ChainSpec,
        eig: EigenSystem,
        policy: OccupationPolicy,
        threshold: float = NEAR_ZERO_THRESHOLD,
        imaginary_tol: float = IMAGINARY_TOL,
    ):
        self.spec = spec
        self.eig = eig
        self.policy = policy
        self.imaginary_tol = imaginary_tol
        self.zero_modes: ZeroModePair | None = None
        self.extra_state: np.ndarray | None = None

        cutoff = threshold * spec.hopping
        energies = eig.eigenvalues
        self.occupied = eig.eigenvectors[:, energies <= -cutoff]

        if policy.base_filling == Filling.HALF:
            if policy.zero_mode_p is not None:
                self.zero_modes = localized_zero_modes(eig, spec, threshold)
                self.extra_state = self.zero_modes.hybridized(policy.zero_mode_p, policy.zero_mode_phi)
            else:
                near = np.flatnonzero(np.abs(energies) < cutoff)
                if len(near):
                    self.extra_state = eig.eigenvectors[:, near[0]]

    @property
    def particle_count(self) -> int:
        return self.occupied.shape[1] + (self.extra_state is not None)

    def correlation_matrix(self, window: Window) -> CorrelationMatrix:
        check_window(self.spec, window)
        inside = defects_in_window(self.spec, window)
        if len(inside) > 1:
            raise WindowError(
                f"Window [{window.start}, {window.stop}] contains defects at sites {inside}"
            )

        sites = window.site_slice()
        block = self.occupied[sites]
        entries = block @ block.T
        if self.extra_state is not None:
            local = self.extra_state[sites]
            update = np.outer(local.conj(), local)
            imaginary = float(np.max(np.abs(update.imag), initial=0.0))
            if imaginary > self.imaginary_tol:
                logger.warning(
                    f"GroundState. Dropping imaginary part {imaginary:.2e} in window {window.start}"
                )
            entries = entries + update.real
        entries = 0.5 * (entries + entries.T)
        return CorrelationMatrix(window=window, entries=entries)


def correlation_matrix(
    eig: EigenSystem,
    policy: OccupationPolicy,
    window: Window,
    spec: ChainSpec,
    threshold: float = NEAR_ZERO_THRESHOLD,
) -> CorrelationMatrix:
    return GroundState(spec, eig, policy, threshold).correlation_matrix(window)
