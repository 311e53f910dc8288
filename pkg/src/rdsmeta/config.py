"""Experiment configuration files and their validation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple

from .errors import ConfigError

__all__ = ["ExperimentConfig", "EXPERIMENTS", "data_path", "default_config_path"]

EXPERIMENTS = ("example2", "example3", "example4", "escape", "suite")


def data_path(name: str) -> Path:
    """Path of a file shipped in the package data directory."""
    return Path(str(resources.files("rdsmeta") / "data" / name))


def default_config_path(experiment: str) -> Path:
    return data_path(f"run_{experiment}.json")


@dataclass
class ExperimentConfig:
    """Parameters of one run.

    Paths are resolved relative to the directory of the config file that
    names them.  ``targets`` and ``tolerances`` hold the reference values
    and acceptance tolerances that a run is checked against.
    """

    experiment: str
    system: Optional[Path] = None
    map_spec: Optional[Path] = None
    horizon: int = 40
    N: int = 20
    M: int = 20
    rho: List[float] = field(default_factory=list)
    n_trunc: int = 20
    samples: int = 1_000_000
    seed: int = 0
    fit_window: Optional[Tuple[int, int]] = None
    instances: int = 50
    entropy_horizon: int = 200
    targets: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output_dir: Path = Path("rds-output")

    @classmethod
    def from_dict(cls, d: dict, root: Optional[Path] = None) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in d:
            raise ConfigError("config needs 'experiment'")
        kw = dict(d)
        for key in ("system", "map_spec"):
            if kw.get(key) is not None:
                p = Path(kw[key])
                kw[key] = p if p.is_absolute() or root is None else root / p
        if kw.get("output_dir") is not None:
            kw["output_dir"] = Path(kw["output_dir"])
        if kw.get("fit_window") is not None:
            kw["fit_window"] = tuple(int(x) for x in kw["fit_window"])
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        """Read a JSON config and apply non-``None`` overrides."""
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        for k, v in overrides.items():
            if v is not None:
                d[k] = str(v) if isinstance(v, Path) else v
        for key in ("system", "map_spec"):
            # command-line paths are relative to the working directory
            if overrides.get(key) is not None:
                d[key] = str(Path(overrides[key]).resolve())
        return cls.from_dict(d, root=path.parent)

    @classmethod
    def default(cls, experiment: str, **overrides) -> "ExperimentConfig":
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}")
        return cls.load(default_config_path(experiment), **overrides)

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.system is not None and not Path(self.system).is_file():
            raise ConfigError(f"system file not found: {self.system}")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.N < 0 or self.M < 0:
            raise ConfigError("N and M must be >= 0")
        if self.n_trunc < 0:
            raise ConfigError("n_trunc must be >= 0")
        if any(r > 0 for r in self.rho):
            raise ConfigError("rho values must be <= 0")
        if self.samples < 1000:
            raise ConfigError("samples must be >= 1000")
        if self.instances < 1:
            raise ConfigError("instances must be >= 1")
        if self.entropy_horizon < 2:
            raise ConfigError("entropy_horizon must be >= 2")
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not 0 <= lo < hi <= self.horizon:
                raise ConfigError("fit_window must satisfy 0 <= lo < hi <= horizon")
        return self

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        for key in ("system", "map_spec"):
            # hash file contents rather than machine-specific paths
            p = d.pop(key)
            d[key] = None if p is None else Path(p).name
            if p is not None and Path(p).is_file():
                d[key + "_content"] = json.loads(Path(p).read_text())
        d.pop("output_dir")
        return d
