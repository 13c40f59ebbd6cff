"""Run configuration shared by the CLI and the panels."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError


@dataclass
class RunConfig:
    system: str | None = None
    params: dict = field(default_factory=dict)
    criteria: str = "all"
    gauge: str = "identity"
    grid_h: float = 10.0
    grid_step: float = 0.5
    tmax: float = 100.0
    delta_max: float = 6.0
    tol: float = 1e-6
    ncap: float = 1e3
    ncap_nonuniform: float = 1e6
    eval_cap: int = 1_000_000
    seed: int = 1
    out: str | None = None
    format: str = "json"
    omega_const: bool = False
    custom_system: dict | None = None
    probes: list | None = None

    def selected_criteria(self):
        if self.criteria in (None, "all", ""):
            return None
        return {c.strip() for c in self.criteria.split(",") if c.strip()}

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out", None)
        return d


_FLOAT_FIELDS = {"grid_h", "grid_step", "tmax", "delta_max", "tol", "ncap", "ncap_nonuniform"}


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def merge_config(file_doc: dict | None, flag_values: dict) -> RunConfig:
    """File values first, then CLI flags override."""
    cfg = RunConfig()
    for source in (file_doc or {}), flag_values:
        for key, value in source.items():
            if value is None:
                continue
            if key in _FLOAT_FIELDS:
                value = float(value)
            elif key in ("seed", "eval_cap"):
                value = int(value)
            setattr(cfg, key, value)
    if cfg.tol <= 0:
        raise ConfigError("tol must be positive")
    if cfg.ncap <= 0 or cfg.ncap_nonuniform <= 0:
        raise ConfigError("caps must be positive")
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    return cfg
