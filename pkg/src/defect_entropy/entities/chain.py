from enum import StrEnum
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Boundary(StrEnum):
    PERIODIC = "periodic"
    OPEN = "open"


class DefectKind(StrEnum):
    ONE_SITE = "one_site"
    THREE_SITE = "three_site"


class DefectSpec(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    cell_index: int = Field(alias="cell", ge=1)
    kind: DefectKind


class ChainSpec(BaseModel):
    """SSH chain of N = 2L sites; cell m holds sites (2m-1, 2m)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n_sites: int = Field(gt=0)
    hopping: float = Field(default=1.0, alias="t", gt=0)
    delta: float = Field(ge=-1, le=1)
    boundary: Boundary = Boundary.PERIODIC
    defects: tuple[DefectSpec, ...] = ()

    @model_validator(mode="after")
    def check_layout(self) -> Self:
        if self.n_sites % 2:
            raise ValueError(f"n_sites must be even, got {self.n_sites}")
        cells = [defect.cell_index for defect in self.defects]
        for cell in cells:
            if cell > self.n_cells:
                raise ValueError(f"Defect cell {cell} outside [1, {self.n_cells}]")
        if any(b <= a for a, b in zip(cells, cells[1:])):
            raise ValueError(f"Defect cells must be strictly increasing, got {cells}")
        if self.boundary == Boundary.PERIODIC and len(cells) % 2:
            raise ValueError(
                f"A periodic chain needs an even number of defects, got {len(cells)}"
            )
        return self

    @property
    def n_cells(self) -> int:
        return self.n_sites // 2

    def canonical_json(self) -> str:
        return self.model_dump_json(by_alias=True)
