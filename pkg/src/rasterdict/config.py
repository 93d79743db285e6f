"""Service configuration: JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

ENV_PORT = "RASTERDICT_PORT"
ENV_DATA_DIR = "RASTERDICT_DATA_DIR"


@dataclass
class ServiceConfig:
    port: int = 8080
    data_dir: str = "data"
    source_timeout_ms: int = 2000
    search_deadline_ms: int = 5000
    sources: list[dict] = field(default_factory=lambda: [{"id": "digitized", "enabled": True}])


def load_config(path: Optional[str] = None, env=os.environ) -> ServiceConfig:
    config = ServiceConfig()
    if path:
        doc = json.loads(Path(path).read_text("utf-8"))
        for key in ("port", "data_dir", "source_timeout_ms", "search_deadline_ms", "sources"):
            if key in doc:
                setattr(config, key, doc[key])
    if env.get(ENV_PORT):
        config.port = int(env[ENV_PORT])
    if env.get(ENV_DATA_DIR):
        config.data_dir = env[ENV_DATA_DIR]
    return config
