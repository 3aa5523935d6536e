"""Learning-rate and spread schedules plus the two Gaussian neighborhood kernels.

Data-driven phase: rate ``a(t)`` and spread ``sigma(t)`` decay exponentially.
Landmark-driven phase: rate ``b(t)`` is a Gaussian bump over steps centered on
``t_center`` with width ``rho_b``; spread ``rho(t)`` decays exponentially.
``tau_b`` is carried in the config for completeness but no schedule reads it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Union

from . import _kernels
from .core import NodeGrid

LandmarkKey = Union[int, str]


class ConfigError(ValueError):
    """Invalid training configuration; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


LANDMARK_FIELDS = ("b_max", "b_min", "tau_b", "t_center", "rho_b", "rho_max", "rho_min", "tau_rho")


@dataclass(frozen=True)
class TrainConfig:
    kx: int
    ky: int
    t_max: int
    a_max: float
    a_min: float
    tau_a: float
    sigma_max: float
    sigma_min: float
    tau_sigma: float
    b_max: Optional[float] = None
    b_min: Optional[float] = None
    tau_b: Optional[float] = None
    t_center: Optional[float] = None
    rho_b: Optional[float] = None
    rho_max: Optional[float] = None
    rho_min: Optional[float] = None
    tau_rho: Optional[float] = None
    p_th: float = 0.0
    landmarks: tuple[tuple[LandmarkKey, int], ...] = field(default=())
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "landmarks", tuple((k, int(n)) for k, n in self.landmarks))
        self.validate()

    @property
    def grid(self) -> NodeGrid:
        return NodeGrid(self.kx, self.ky)

    @property
    def uses_landmarks(self) -> bool:
        return self.p_th > 0

    def validate(self) -> None:
        for key in ("kx", "ky", "t_max"):
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(key, f"must be a positive integer, got {v!r}")
        if not 0.0 <= self.p_th < 1.0:
            raise ConfigError("p_th", f"must satisfy 0 <= p_th < 1, got {self.p_th}")
        if not 0.0 < self.a_min <= self.a_max < 1.0:
            raise ConfigError("a_max", f"need 0 < a_min <= a_max < 1, got a_min={self.a_min}, a_max={self.a_max}")
        _check_pair("sigma", self.sigma_max, self.sigma_min)
        for key in ("tau_a", "tau_sigma"):
            _check_positive(key, getattr(self, key))
        if self.p_th > 0:
            missing = [k for k in LANDMARK_FIELDS if getattr(self, k) is None]
            if missing:
                raise ConfigError(missing[0], "required when p_th > 0")
        if self.b_max is not None or self.b_min is not None:
            if self.b_max is None or self.b_min is None or not 0.0 <= self.b_min <= self.b_max <= 1.0:
                raise ConfigError("b_max", f"need 0 <= b_min <= b_max <= 1, got b_min={self.b_min}, b_max={self.b_max}")
        if self.rho_max is not None or self.rho_min is not None:
            _check_pair("rho", self.rho_max, self.rho_min)
        for key in ("tau_b", "rho_b", "tau_rho"):
            if getattr(self, key) is not None:
                _check_positive(key, getattr(self, key))
        if self.t_center is not None and not math.isfinite(self.t_center):
            raise ConfigError("t_center", "must be finite")
        k = self.kx * self.ky
        nodes = [n for _, n in self.landmarks]
        for n in nodes:
            if not 0 <= n < k:
                raise ConfigError("landmarks", f"node {n} outside grid of {k} nodes")
        if len(set(nodes)) != len(nodes):
            raise ConfigError("landmarks", f"landmark nodes must be distinct, got {nodes}")

    def replace(self, **changes) -> "TrainConfig":
        data = asdict(self)
        data.update(changes)
        return TrainConfig(**data)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_positive(key, v):
    if v is None or not (v > 0 and math.isfinite(v)):
        raise ConfigError(key, f"must be positive, got {v}")


def _check_pair(prefix, hi, lo):
    if hi is None or lo is None or not 0 < lo <= hi or not math.isfinite(hi):
        raise ConfigError(f"{prefix}_max", f"need 0 < {prefix}_min <= {prefix}_max, got min={lo}, max={hi}")


def _landmark_params(cfg: TrainConfig):
    if any(getattr(cfg, k) is None for k in LANDMARK_FIELDS if k != "tau_b"):
        raise ConfigError("b_max", "landmark-phase parameters are not set")


def rate_a(t, cfg: TrainConfig) -> float:
    return _kernels.decay(float(t), cfg.a_max, cfg.a_min, float(cfg.tau_a))


def spread_sigma(t, cfg: TrainConfig) -> float:
    return _kernels.decay(float(t), cfg.sigma_max, cfg.sigma_min, float(cfg.tau_sigma))


def rate_b(t, cfg: TrainConfig) -> float:
    _landmark_params(cfg)
    return _kernels.bump(float(t), cfg.b_max, cfg.b_min, float(cfg.t_center), float(cfg.rho_b))


def spread_rho(t, cfg: TrainConfig) -> float:
    _landmark_params(cfg)
    return _kernels.decay(float(t), cfg.rho_max, cfg.rho_min, float(cfg.tau_rho))


def _grid_sqdist(grid: NodeGrid, i: int, j: int) -> float:
    for k in (i, j):
        if not 0 <= k < grid.size:
            raise IndexError(f"node {k} out of range for {grid.size} nodes")
    return _kernels.grid_sqdist(grid.locations, i, j)


def neigh_a(winner: int, k: int, t, cfg: TrainConfig, grid: NodeGrid) -> float:
    """Data-phase neighborhood factor of node ``k`` around ``winner``."""
    return _kernels.kernel(rate_a(t, cfg), spread_sigma(t, cfg), _grid_sqdist(grid, winner, k))


def neigh_b(landmark_node: int, k: int, t, cfg: TrainConfig, grid: NodeGrid) -> float:
    return _kernels.kernel(rate_b(t, cfg), spread_rho(t, cfg), _grid_sqdist(grid, landmark_node, k))
