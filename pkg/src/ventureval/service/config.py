"""Service configuration: YAML file with environment-variable overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml


@dataclass
class ServiceConfig:
    store_dir: str = "ventureval-store"
    host: str = "127.0.0.1"
    port: int = 8764
    admin_token: str = "admin-token"
    entrepreneur_token: str = "entrepreneur-token"
    default_schema: str = "mentor10"
    default_m: int = 5
    m_bounds: tuple[int, int] = (5, 10)
    alpha: float = 0.5
    weighting_scheme: str = "unweighted"  # unweighted | machine_perf | crowd_perf | hybrid_perf
    retrain_min_labeled: int = 20
    static_dir: str | None = None  # optional built dashboard to serve at /


_ENV_PREFIX = "VENTUREVAL_"


def load_config(path: str | Path | None = None) -> ServiceConfig:
    data: dict = {}
    if path is not None:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    cfg = ServiceConfig(**data)
    for f in fields(ServiceConfig):
        env = os.environ.get(_ENV_PREFIX + f.name.upper())
        if env is None:
            continue
        current = getattr(cfg, f.name)
        if isinstance(current, bool):
            setattr(cfg, f.name, env.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(cfg, f.name, int(env))
        elif isinstance(current, float):
            setattr(cfg, f.name, float(env))
        elif isinstance(current, tuple):
            lo, hi = env.split(",")
            setattr(cfg, f.name, (int(lo), int(hi)))
        else:
            setattr(cfg, f.name, env)
    return cfg
