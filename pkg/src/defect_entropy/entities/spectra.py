from enum import StrEnum
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import expit


class EigenSystem(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float = 0.0

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


class Window(BaseModel):
    """Interval of `length` cells starting at cell `start` (1-based)."""

    model_config = ConfigDict(frozen=True)

    start: int = Field(ge=1)
    length: int = Field(ge=1)

    @property
    def stop(self) -> int:
        return self.start + self.length - 1

    def site_slice(self) -> slice:
        # 0-based sites 2m-2 ... 2(m+l-1)-1
        return slice(2 * self.start - 2, 2 * self.stop)


class Filling(StrEnum):
    BELOW_HALF = "below_half"
    HALF = "half"


class OccupationPolicy(BaseModel):
    """Which single-particle modes are filled.

    `below_half` fills every mode below the near-zero window. `half` adds one
    zero-mode state: the hybridized |Psi_p> when `zero_mode_p` is set, otherwise
    the lower member of the eigensolver's near-zero pair.
    """

    model_config = ConfigDict(frozen=True)

    base_filling: Filling = Filling.BELOW_HALF
    zero_mode_p: float | None = Field(default=None, ge=0, le=1)
    zero_mode_phi: float = 0.0

    @model_validator(mode="after")
    def check_zero_mode(self) -> Self:
        if self.zero_mode_p is not None and self.base_filling != Filling.HALF:
            raise ValueError("A hybridized zero mode needs half filling")
        return self


class ZeroModePair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    psi1: np.ndarray
    psi2: np.ndarray
    energies: tuple[float, float]

    def hybridized(self, p: float, phi: float = 0.0) -> np.ndarray:
        """|Psi_p> = sqrt(1-p)|psi1> + e^{i phi} sqrt(p)|psi2>."""
        if not 0 <= p <= 1:
            raise ValueError(f"Hybridization p must lie in [0, 1], got {p}")
        state = np.sqrt(1 - p) * self.psi1 + np.exp(1j * phi) * np.sqrt(p) * self.psi2
        if phi == 0.0:
            return state.real
        return state


class CorrelationMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    window: Window
    entries: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries))


class EntanglementSpectrum(BaseModel):
    """Correlation eigenvalues and their pseudo-energies log((1-l)/l).

    Eigenvalues 0 and 1 map to +inf and -inf.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lambdas: np.ndarray
    epsilons: np.ndarray

    @classmethod
    def from_lambdas(cls, lambdas: np.ndarray) -> Self:
        lambdas = np.asarray(lambdas, dtype=float)
        with np.errstate(divide="ignore"):
            epsilons = np.log1p(-lambdas) - np.log(lambdas)
        return cls(lambdas=lambdas, epsilons=epsilons)

    @classmethod
    def from_epsilons(cls, epsilons: np.ndarray) -> Self:
        epsilons = np.asarray(epsilons, dtype=float)
        lambdas = expit(-epsilons)
        return cls(lambdas=lambdas, epsilons=epsilons)
