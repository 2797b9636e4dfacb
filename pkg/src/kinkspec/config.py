"""Run configuration: a sectioned key-value file with flag overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .params import Grid, ModelParams


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (CLI exit code 2)."""


@dataclass
class RunConfig:
    # [model]
    m: float = 1.0
    g: float = 1.0
    # [grid]
    grid_n: int = 4096
    grid_x_factor: float = 20.0
    # [momentum]
    k_max_factor: float = 40.0
    k_order: int = 24
    # [mollifier] — single canonical bump profile
    mollifier: str = "bump"
    # [kappa]
    kappa_list: tuple = (250.0, 500.0, 1000.0, 2000.0)
    # [theta]
    theta: float = 1.0
    # [fock]
    fock_modes: int = 4
    fock_n_max: int = 8
    fock_k_max: float = 3.0
    # [output]
    out_dir: str = "out"
    formats: tuple = ("csv", "json")
    seed: int = 20260810

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not (self.m > 0 and self.g > 0):
            raise ConfigError("model couplings must be positive")
        if self.grid_n < 64:
            raise ConfigError("grid_n too small")
        if self.grid_x_factor * 1.0 < 10.0:
            raise ConfigError("grid extent must satisfy m*x_max >= 10")
        if any(k <= self.m for k in self.kappa_list):
            raise ConfigError("every kappa must exceed the mass scale m")
        if self.theta <= 0:
            raise ConfigError("theta must be positive")
        if self.mollifier != "bump":
            raise ConfigError(f"unknown mollifier profile {self.mollifier!r}")
        bad = set(self.formats) - {"csv", "json"}
        if bad:
            raise ConfigError(f"unknown output formats: {sorted(bad)}")
        if not (1 <= self.fock_modes <= 8 and 1 <= self.fock_n_max <= 12):
            raise ConfigError("fock truncation out of the supported desk-scale range")

    # -- derived objects ---------------------------------------------------
    def model(self) -> ModelParams:
        return ModelParams(m=self.m, g=self.g)

    def grid(self, n: int | None = None) -> Grid:
        return Grid(x_max=self.grid_x_factor / self.m, n=n or self.grid_n)

    # -- serialization -----------------------------------------------------
    _SECTIONS = {
        "model": ("m", "g"),
        "grid": ("grid_n", "grid_x_factor"),
        "momentum": ("k_max_factor", "k_order"),
        "mollifier": ("mollifier",),
        "kappa": ("kappa_list",),
        "theta": ("theta",),
        "fock": ("fock_modes", "fock_n_max", "fock_k_max"),
        "output": ("out_dir", "formats", "seed"),
    }

    def to_file(self, path) -> Path:
        cp = configparser.ConfigParser()
        for section, keys in self._SECTIONS.items():
            cp[section] = {}
            for key in keys:
                val = getattr(self, key)
                if isinstance(val, tuple):
                    val = ",".join(str(v) for v in val)
                cp[section][key] = str(val)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            cp.write(fh)
        return path

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for section, keys in cls._SECTIONS.items():
            if section not in cp:
                continue
            for key in keys:
                if key not in cp[section]:
                    continue
                raw = cp[section][key]
                kwargs[key] = _parse_field(key, raw)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _parse_field(key: str, raw: str):
    raw = raw.strip()
    if key == "kappa_list":
        try:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        except ValueError as exc:
            raise ConfigError(f"bad kappa list {raw!r}") from exc
    if key == "formats":
        return tuple(v.strip() for v in raw.split(",") if v.strip())
    if key in ("grid_n", "k_order", "fock_modes", "fock_n_max", "seed"):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc
    if key in ("m", "g", "grid_x_factor", "k_max_factor", "theta", "fock_k_max"):
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from exc
    return raw
