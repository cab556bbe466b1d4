from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.special import xlogy

EMPTY_SECTOR_THRESHOLD = 1e-14


class EntropyTotals(BaseModel):
    model_config = ConfigDict(frozen=True)

    renyi: float
    vn: float
    configuration: float
    fluctuation: float
    mean_charge: float


class ChargeResolvedTable(BaseModel):
    """Per-sector partition functions and entropies of one subsystem.

    Sectors whose probability falls below the empty threshold carry NaN entropies.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: float
    q_values: np.ndarray
    z_n_q: np.ndarray
    z_1_q: np.ndarray
    sre_renyi: np.ndarray
    sre_vn: np.ndarray
    totals: EntropyTotals
    empty_threshold: float = EMPTY_SECTOR_THRESHOLD

    @classmethod
    def from_sectors(
        cls,
        n: float,
        q_values: np.ndarray,
        z_n_q: np.ndarray,
        z_1_q: np.ndarray,
        sre_vn: np.ndarray,
        total_vn: float | None = None,
        total_renyi: float | None = None,
        empty_threshold: float = EMPTY_SECTOR_THRESHOLD,
    ) -> Self:
        q_values = np.asarray(q_values)
        z_n_q = np.clip(np.asarray(z_n_q, dtype=float), 0.0, None)
        z_1_q = np.clip(np.asarray(z_1_q, dtype=float), 0.0, None)
        occupied = z_1_q > empty_threshold
        sre_vn = np.where(occupied, np.asarray(sre_vn, dtype=float), np.nan)

        if n == 1:
            sre_renyi = sre_vn.copy()
        else:
            sre_renyi = np.full(len(q_values), np.nan)
            usable = occupied & (z_n_q > 0)
            sre_renyi[usable] = (
                np.log(z_n_q[usable]) - n * np.log(z_1_q[usable])
            ) / (1 - n)

        configuration = float(np.sum(z_1_q[occupied] * sre_vn[occupied]))
        fluctuation = float(-np.sum(xlogy(z_1_q, z_1_q)))
        vn = configuration + fluctuation if total_vn is None else total_vn
        if n == 1:
            renyi = vn
        elif total_renyi is not None:
            renyi = total_renyi
        else:
            renyi = float(np.log(np.sum(z_n_q)) / (1 - n))

        totals = EntropyTotals(
            renyi=renyi,
            vn=vn,
            configuration=configuration,
            fluctuation=fluctuation,
            mean_charge=float(np.sum(q_values * z_1_q)),
        )
        return cls(
            n=n,
            q_values=q_values,
            z_n_q=z_n_q,
            z_1_q=z_1_q,
            sre_renyi=sre_renyi,
            sre_vn=sre_vn,
            totals=totals,
            empty_threshold=empty_threshold,
        )

    @property
    def occupied(self) -> np.ndarray:
        return self.z_1_q > self.empty_threshold

    def index_of(self, q: float) -> int:
        matches = np.flatnonzero(np.isclose(self.q_values, q))
        if len(matches) == 0:
            raise KeyError(f"Charge {q} not tabulated")
        return int(matches[0])

    def probability(self, q: float) -> float:
        try:
            return float(self.z_1_q[self.index_of(q)])
        except KeyError:
            return 0.0

    def renyi_at(self, q: float) -> float:
        return float(self.sre_renyi[self.index_of(q)])

    def vn_at(self, q: float) -> float:
        return float(self.sre_vn[self.index_of(q)])

    def shifted(self, offset: int) -> Self:
        """Relabel every sector q -> q + offset; entropies are unchanged."""
        totals = self.totals.model_copy(update={"mean_charge": self.totals.mean_charge + offset})
        return self.model_copy(update={"q_values": self.q_values + offset, "totals": totals})
