"""Service configuration: JSON file plus AUTOSIMP_* environment overrides."""

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    models_dir: str | None = None
    selector_4cc: str | None = None
    selector_multilabel: str | None = None
    data_dir: str = "autosimp-data"
    seed: int = 0
    remote_timeout: float = 2.0
    # each entry: {"backend_id": str, "endpoint": str, "timeout": float?}
    remote_backends: list[dict] = field(default_factory=list)

    def resolved(self) -> dict:
        return asdict(self)


_ENV_OVERRIDES = {
    "AUTOSIMP_HOST": ("host", str),
    "AUTOSIMP_PORT": ("port", int),
    "AUTOSIMP_MODELS_DIR": ("models_dir", str),
    "AUTOSIMP_SELECTOR_4CC": ("selector_4cc", str),
    "AUTOSIMP_SELECTOR_MULTILABEL": ("selector_multilabel", str),
    "AUTOSIMP_DATA_DIR": ("data_dir", str),
    "AUTOSIMP_SEED": ("seed", int),
    "AUTOSIMP_REMOTE_TIMEOUT": ("remote_timeout", float),
}


def load_service_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ServiceConfig:
    """Read the config file (when given), then apply environment overrides."""
    env = os.environ if env is None else env
    cfg = ServiceConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(asdict(cfg))
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, value)
    for var, (attr, cast) in _ENV_OVERRIDES.items():
        if var in env:
            setattr(cfg, attr, cast(env[var]))
    return cfg
