from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

from defect_entropy.analytics.asymptotics import DELTA_Q_CUTOFF
from defect_entropy.analytics.statmech import DEGENERACY_TOL
from defect_entropy.entities.tables import EMPTY_SECTOR_THRESHOLD
from defect_entropy.lattice.entanglement import LAMBDA_CLAMP
from defect_entropy.lattice.groundstate import IMAGINARY_TOL, NEAR_ZERO_THRESHOLD

ROOT = Path(__file__).parents[2]


class ToleranceSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="DEFECT_ENTROPY_TOLERANCES__")

    near_zero: float = NEAR_ZERO_THRESHOLD
    empty_sector: float = EMPTY_SECTOR_THRESHOLD
    lambda_clamp: float = LAMBDA_CLAMP
    degeneracy: float = DEGENERACY_TOL
    imaginary: float = IMAGINARY_TOL
    probability_floor: float = 1e-6
    deviation: float = 1e-3


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="DEFECT_ENTROPY_", env_nested_delimiter="__")

    threads: int = 1
    log_level: str = "INFO"
    output_dir: Path = ROOT / "data"
    delta_q_cutoff: int = DELTA_Q_CUTOFF
    bulk_margin_xi: float = 5.0
    tolerances: ToleranceSettings = ToleranceSettings()
