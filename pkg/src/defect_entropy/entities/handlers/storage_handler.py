import csv
import hashlib
import json
import math
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import numpy as np
import pydantic
import scipy
from pydantic import BaseModel

from defect_entropy.entities.scan import SCHEMA_VERSION, OutputPaths, ScanConfig, ScanResult, default_chain
from defect_entropy.log import logger
from defect_entropy.settings import Settings


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _package_version() -> str:
    try:
        return version("defect_entropy")
    except PackageNotFoundError:
        return "unknown"


def _merge(base: dict, overrides: dict) -> dict:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class StorageHandler:
    def __init__(self, settings: Settings):
        self.settings = settings

    def load_config(self, path: Path | None = None, overrides: dict | None = None) -> ScanConfig:
        # partial chain overrides land on the default chain
        data = {"chain": default_chain().model_dump(mode="json", by_alias=True)}
        if path is not None:
            data = _merge(data, json.loads(path.read_text(encoding="utf-8")))
        return ScanConfig(**_merge(data, overrides or {}))

    def resolve_outputs(self, config: ScanConfig, stem: str) -> OutputPaths:
        if config.outputs is not None:
            return config.outputs
        return OutputPaths(
            csv_path=self.settings.output_dir / f"{stem}.csv",
            json_path=self.settings.output_dir / f"{stem}.json",
        )

    def save_rows(self, rows: list[BaseModel], path: Path, kind: str) -> None:
        if not rows:
            raise ValueError("StorageHandler. Refusing to write an empty table")
        fieldnames = list(type(rows[0]).model_fields)
        path.parent.mkdir(parents=True, exist_ok=True)
        staging = path.with_name(path.name + ".partial")
        with staging.open("w", encoding="utf-8", newline="") as f:
            f.write(f"#schema={SCHEMA_VERSION} kind={kind}\n")
            writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _cell(value) for key, value in row.model_dump().items()})
        staging.replace(path)
        logger.info(f"StorageHandler. Wrote {len(rows)} rows to {path}")

    def save_metadata(self, config: ScanConfig, result: ScanResult, path: Path) -> None:
        chain_json = config.chain.canonical_json()
        document = {
            "schema": SCHEMA_VERSION,
            "kind": result.kind,
            "config": config.model_dump(mode="json", by_alias=True),
            "chain_sha256": hashlib.sha256(chain_json.encode("utf-8")).hexdigest(),
            "tolerances": self.settings.tolerances.model_dump(),
            "versions": {
                "defect_entropy": _package_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pydantic": pydantic.VERSION,
            },
            "failures": result.failures,
            "rows": [
                {key: _json_value(value) for key, value in row.model_dump(mode="json").items()}
                for row in result.rows
            ],
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        staging = path.with_name(path.name + ".partial")
        staging.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        staging.replace(path)
        logger.info(f"StorageHandler. Wrote metadata to {path}")

    def save(self, config: ScanConfig, result: ScanResult, stem: str) -> OutputPaths:
        outputs = self.resolve_outputs(config, stem)
        self.save_rows(result.rows, outputs.csv_path, result.kind)
        if outputs.json_path is not None:
            self.save_metadata(config, result, outputs.json_path)
        return outputs
