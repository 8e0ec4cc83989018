"""Flat ``key=value`` experiment configs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

EXPERIMENTS = ("thm1", "thm2-proxy", "tribes-baseline", "sauer-shelah",
               "coalition-search", "question1")

# key -> type; every key doubles as a CLI flag (--coalition-samples etc.)
KEYS = {
    "n": int, "delta": float, "alpha": float, "k": int, "m": int, "s": int,
    "trials": int, "seed": int, "budget": int, "nu": int, "samples": int,
    "coalition_samples": int, "n_max": int, "t_target": float, "strategy": str,
    "objective": str, "mode": str, "tribes_k": int, "workers": int, "max_mk": int,
}

REQUIRED = {
    "thm1": ("n", "delta", "trials", "seed"),
    "thm2-proxy": ("nu", "delta", "trials", "seed"),
    "tribes-baseline": ("seed",),
    "sauer-shelah": ("n_max", "trials", "seed"),
    "coalition-search": ("n", "k", "m", "s", "seed"),
    "question1": ("n", "s", "t_target", "budget", "seed"),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    csv: Optional[str] = None

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        missing = [key for key in REQUIRED[self.experiment] if self.params.get(key) is None]
        if missing:
            raise ConfigError(f"{self.experiment} needs: {', '.join(missing)}")
        p = self.params
        if "delta" in p and not 0 <= p["delta"] <= 0.5:
            raise ConfigError("delta must lie in [0, 1/2]")
        if "alpha" in p and not 0 < p["alpha"] < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        for key in ("trials", "n", "nu", "n_max"):
            if key in p and p[key] < 1:
                raise ConfigError(f"{key} must be positive")
        if "budget" in p and p["budget"] < 0:
            raise ConfigError("budget must be non-negative")
        return self

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "params": dict(sorted(self.params.items()))}


def coerce(key: str, raw: str):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return KEYS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config(text: str) -> ExperimentConfig:
    experiment = None
    params = {}
    out = csv = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "experiment":
            experiment = value
        elif key == "out":
            out = value
        elif key == "csv":
            csv = value
        else:
            params[key] = coerce(key, value)
    if experiment is None:
        raise ConfigError("config must set experiment=")
    return ExperimentConfig(experiment, params, out, csv)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
