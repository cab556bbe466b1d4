from enum import StrEnum
from pathlib import Path
from typing import Self

from pydantic import BaseModel, Field, model_validator

from defect_entropy.entities.cases import GapPosition
from defect_entropy.entities.chain import Boundary, ChainSpec, DefectKind, DefectSpec
from defect_entropy.entities.spectra import Filling

SCHEMA_VERSION = 1


class ScanMode(StrEnum):
    LATTICE = "lattice"
    ASYMPTOTIC = "asymptotic"
    BOTH = "both"
    STATMECH = "statmech"
    DIMERIZED = "dimerized"
    AKLT = "aklt"


ANALYTICAL_MODES = {ScanMode.ASYMPTOTIC, ScanMode.BOTH, ScanMode.STATMECH}
LATTICE_MODES = {ScanMode.LATTICE, ScanMode.BOTH}


def default_chain() -> ChainSpec:
    """N = 400, t = 1, delta = 0.3, periodic, one-site defects at cells L/4 and 3L/4."""
    return ChainSpec(
        n_sites=400,
        hopping=1.0,
        delta=0.3,
        boundary=Boundary.PERIODIC,
        defects=(
            DefectSpec(cell_index=50, kind=DefectKind.ONE_SITE),
            DefectSpec(cell_index=150, kind=DefectKind.ONE_SITE),
        ),
    )


class OutputPaths(BaseModel):
    csv_path: Path
    json_path: Path | None = None


class ScanConfig(BaseModel):
    chain: ChainSpec = Field(default_factory=default_chain)
    window_length: int = Field(default=20, ge=1)
    m_range: tuple[int, int] | None = None
    n_list: list[float] = [1.0]
    p_list: list[float] = []
    filling: Filling = Filling.BELOW_HALF
    mode: ScanMode = ScanMode.LATTICE
    outputs: OutputPaths | None = None
    # None falls back to the deviation tolerance of the settings
    tolerance: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_ranges(self) -> Self:
        cells = self.chain.n_cells
        if self.window_length > cells:
            raise ValueError(f"Window of {self.window_length} cells exceeds the chain of {cells}")
        if not self.n_list or any(n <= 0 for n in self.n_list):
            raise ValueError(f"Renyi indices must be positive, got {self.n_list}")
        if any(not 0 <= p <= 1 for p in self.p_list):
            raise ValueError(f"Hybridizations must lie in [0, 1], got {self.p_list}")
        if self.m_range is not None:
            start, stop = self.m_range
            if start < 1 or stop < start or stop + self.window_length - 1 > cells:
                raise ValueError(f"Window starts {self.m_range} do not fit {cells} cells")
        if self.mode in ANALYTICAL_MODES and not 0 < self.chain.delta < 1:
            raise ValueError(f"Mode {self.mode} needs 0 < delta < 1, got {self.chain.delta}")
        if self.p_list and self.mode in LATTICE_MODES:
            if len(self.chain.defects) != 2:
                raise ValueError("Zero-mode scans need exactly two defects")
            if self.filling != Filling.HALF:
                raise ValueError("Zero-mode scans occupy one zero mode, set filling to 'half'")
        return self

    def window_starts(self) -> list[int]:
        if self.m_range is None:
            return list(range(1, self.chain.n_cells - self.window_length + 2))
        return list(range(self.m_range[0], self.m_range[1] + 1))


class ScanRow(BaseModel):
    m: int | None = None
    case: str
    p: float | None = None
    q: int
    delta_q: int
    n: float
    Z1_q: float
    Zn_q: float
    S_n_q: float
    S_q: float
    S_n: float
    S: float
    S_c: float
    S_f: float
    source: str
    deviation: float | None = None


class EquipartitionRow(BaseModel):
    case: str
    p: float | None = None
    q: int
    delta_q: int
    mu: float
    S_tilde: float
    Z1_q: float
    S_q: float
    gap_position: GapPosition
    decomposition_residual: float
    mu_invariance_residual: float


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ScanResult(BaseModel):
    kind: str
    rows: list[ScanRow] | list[EquipartitionRow]
    failures: list[str] = []
