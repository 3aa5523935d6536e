"""Experiment presets (Zoo and formant) and the flat ``key = value`` config format."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Dataset, LandmarkSet
from .datasets import FormantData
from .schedules import ConfigError, TrainConfig

CONFIG_KEYS = (
    "kx", "ky", "t_max", "a_max", "a_min", "tau_a", "sigma_max", "sigma_min", "tau_sigma",
    "b_max", "b_min", "tau_b", "t_center", "rho_b", "rho_max", "rho_min", "tau_rho", "p_th",
    "landmarks",
)
# accepted in files on top of CONFIG_KEYS
EXTRA_KEYS = ("seed", "dataset")
INT_KEYS = ("kx", "ky", "t_max", "seed")


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    dataset: str  # "zoo" or "formant"
    config: TrainConfig

    @property
    def landmarks(self):
        return self.config.landmarks


def _zoo(name, sigma_min=0.1, landmarks=(), **lama) -> ExperimentPreset:
    cfg = TrainConfig(
        kx=25, ky=25, t_max=60000, a_max=0.5, a_min=0.15, tau_a=19999,
        sigma_max=19, sigma_min=sigma_min, tau_sigma=19999, landmarks=landmarks, **lama,
    )
    return ExperimentPreset(name, "zoo", cfg)


def _zoo_lama(name, sigma_min, b_min, rho_b, rho_min, p_th, landmarks):
    return _zoo(
        name, sigma_min=sigma_min, landmarks=landmarks, b_max=0.4, b_min=b_min, tau_b=19999,
        t_center=15000, rho_b=rho_b, rho_max=13, rho_min=rho_min, tau_rho=19999, p_th=p_th,
    )


def _formant(name, a_min, sigma_min, landmarks=(), **lama) -> ExperimentPreset:
    cfg = TrainConfig(
        kx=10, ky=10, t_max=60000, a_max=0.3, a_min=a_min, tau_a=19999,
        sigma_max=4, sigma_min=sigma_min, tau_sigma=19999, landmarks=landmarks, **lama,
    )
    return ExperimentPreset(name, "formant", cfg)


PRESETS: dict[str, ExperimentPreset] = {
    p.name: p
    for p in (
        _zoo("zoo-som"),
        _zoo_lama("zoo-lama1", 0.1, 0.01, 20000, 3, 0.01, ((75, 312),)),
        _zoo_lama("zoo-lama2", 0.01, 0.075, 25000, 0.7, 0.05, ((21, 303), (58, 321))),
        _zoo_lama("zoo-lama3", 0.01, 0.075, 25000, 1, 0.07, ((48, 37), (74, 552), (80, 572))),
        _zoo_lama("zoo-lama4", 0.01, 0.1, 25000, 1.5, 0.09, ((48, 0), (89, 24), (74, 600), (80, 624))),
        _formant("formant-som", a_min=0.1, sigma_min=0.3),
        _formant(
            "formant-lama", a_min=0.05, sigma_min=0.4, b_max=0.3, b_min=0.08, tau_b=19999,
            t_center=30000, rho_b=15000, rho_max=2, rho_min=0.8, tau_rho=19999, p_th=0.1,
            landmarks=(("a", 94), ("i", 0), ("u", 4), ("e", 41), ("o", 49)),
        ),
    )
}


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def _parse_number(key: str, text: str):
    try:
        if key in INT_KEYS:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a literal number, got {text!r}") from None


def _parse_landmarks(text: str):
    pairs = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            key, node = (s.strip() for s in item.split(":"))
            pairs.append((int(key) if key.lstrip("-").isdigit() else key, int(node)))
        except ValueError:
            raise ConfigError("landmarks", f"expected key:node pairs, got {item!r}") from None
    return tuple(pairs)


def parse_config(text: str) -> tuple[TrainConfig, Optional[str]]:
    """Parse ``key = value`` lines; returns the config and the optional dataset name.

    Blank lines and ``#`` comments are ignored. Landmarks are written as
    ``landmarks = 75:312, 21:303`` (data row or vowel name, then node).
    """
    values: dict = {}
    dataset = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS and key not in EXTRA_KEYS:
            raise ConfigError(key, "unknown key")
        if key in values or (key == "dataset" and dataset is not None):
            raise ConfigError(key, "given twice")
        if key == "landmarks":
            values[key] = _parse_landmarks(value)
        elif key == "dataset":
            dataset = value
        elif value.lower() in ("", "none", "--"):
            continue
        else:
            values[key] = _parse_number(key, value)
    missing = [k for k in ("kx", "ky", "t_max", "a_max", "a_min", "tau_a", "sigma_max", "sigma_min", "tau_sigma") if k not in values]
    if missing:
        raise ConfigError(missing[0], "missing")
    try:
        return TrainConfig(**values), dataset
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def format_config(cfg: TrainConfig, dataset: Optional[str] = None) -> str:
    lines = []
    for key in CONFIG_KEYS + ("seed",):
        v = getattr(cfg, key)
        if key == "landmarks":
            if v:
                lines.append("landmarks = " + ", ".join(f"{k}:{n}" for k, n in v))
        elif v is not None:
            lines.append(f"{key} = {v!r}" if isinstance(v, float) else f"{key} = {v}")
    if dataset:
        lines.append(f"dataset = {dataset}")
    return "\n".join(lines) + "\n"


def resolve_landmarks(cfg: TrainConfig, data: Dataset, formant: Optional[FormantData] = None) -> LandmarkSet:
    """Turn ``(row index | vowel name, node)`` pairs into a :class:`LandmarkSet`."""
    if not cfg.landmarks:
        return LandmarkSet.empty(data.dim)
    vectors, nodes, names = [], [], []
    for key, node in cfg.landmarks:
        if isinstance(key, str):
            if formant is None or key not in formant.vowel_means:
                raise ConfigError("landmarks", f"unknown landmark key {key!r}")
            vectors.append(formant.vowel_means[key])
            names.append(f"/{key}/")
        else:
            if not 0 <= key < len(data):
                raise ConfigError("landmarks", f"data row {key} outside 0..{len(data) - 1}")
            vectors.append(data.rows[key])
            names.append(data.names[key] if data.names else str(key))
        nodes.append(node)
    return LandmarkSet(np.vstack(vectors), nodes, names)
