from enum import StrEnum
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class CaseKind(StrEnum):
    TOPOLOGICAL = "topological"
    TRIVIAL = "trivial"
    DEFECT = "defect"


class BondKind(StrEnum):
    STRONG = "strong"
    WEAK = "weak"


class AsymptoticParams(BaseModel):
    """Elliptic data of a dimerization 0 < delta < 1."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(gt=0, lt=1)
    k: float
    k_prime: float
    epsilon: float = Field(gt=0)

    @property
    def localization_length(self) -> float:
        return float(1.0 / (2.0 * np.arctanh(self.delta)))


class WindowCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    case: CaseKind
    ell: int = Field(ge=1)
    params: AsymptoticParams
    zero_mode_p: float | None = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def check_zero_mode(self) -> Self:
        if self.zero_mode_p is not None and self.case != CaseKind.DEFECT:
            raise ValueError(f"zero_mode_p only applies to defect windows, not {self.case}")
        return self


class AkltRegion(StrEnum):
    TRIVIAL_PRODUCT = "trivial_product"
    AKLT_BULK = "aklt_bulk"
    DEFECT_INTERFACE = "defect_interface"


class AkltState(StrEnum):
    TRIPLET_PM1 = "triplet_pm1"
    HYBRID = "hybrid"


class AkltCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    case: AkltRegion
    ground_state: AkltState = AkltState.TRIPLET_PM1
    p: float | None = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def check_state(self) -> Self:
        if self.ground_state == AkltState.HYBRID:
            if self.case != AkltRegion.DEFECT_INTERFACE:
                raise ValueError(f"Hybrid ground state is only defined at the interface, not {self.case}")
            if self.p is None:
                raise ValueError("Hybrid ground state needs p")
        return self

    @property
    def eta(self) -> float:
        if self.p is None:
            return 0.0
        return float(2.0 * np.sqrt(self.p * (1.0 - self.p)))


class GapPosition(StrEnum):
    GAP = "gap"
    LEVEL = "level"
    DEGENERATE_LEVEL = "degenerate_level"


class ConstrainedState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spectrum: np.ndarray
    q_target: float
    mu: float


class EquipartitionEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: int
    mu: float
    constrained_entropy: float
    sector_probability: float
    reconstructed_sre: float
    gap_position: GapPosition
    decomposition_residual: float
    mu_invariance_residual: float
