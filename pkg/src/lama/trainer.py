"""Alternating data-driven / landmark-driven online training.

Random numbers come from numpy's PCG64 bit generator seeded with
``TrainConfig.seed``. Per step the stream is consumed as:

1. one uniform double ``p`` for the phase choice, drawn only when the landmark
   phase is reachable (``p_th > 0`` and at least one landmark);
2. one uniform double ``u`` for the sample, mapped to ``floor(u * count)``
   where ``count`` is N in the data phase and M in the landmark phase.

With ``p_th == 0`` no phase draw happens, so the stream (and therefore the
whole trajectory) is the one of a plain online SOM with the same seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from . import _kernels
from .core import Dataset, LandmarkSet, NodeGrid, _as_codebook, _as_vector
from .metrics import ErrorReport, error_report
from .schedules import ConfigError, TrainConfig

STANDARD_CHECKPOINTS = (0, 9999, 19999, 29999, 39999, 49999, 59999)


class Phase(enum.Enum):
    DATA_DRIVEN = "data_driven"
    LANDMARK_DRIVEN = "landmark_driven"


@dataclass(frozen=True)
class Checkpoint:
    t: int
    qed: float
    qel: Optional[float]
    te: float
    ste: float

    @classmethod
    def from_report(cls, t: int, report: ErrorReport) -> "Checkpoint":
        return cls(t, report.qed, report.qel, report.te, report.ste)


@dataclass
class TrainTrace:
    checkpoints: list[Checkpoint] = field(default_factory=list)
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    @property
    def steps(self) -> list[int]:
        return [c.t for c in self.checkpoints]

    def series(self, metric: str) -> np.ndarray:
        return np.array([np.nan if getattr(c, metric) is None else getattr(c, metric) for c in self.checkpoints])

    @property
    def final(self) -> Checkpoint:
        return self.checkpoints[-1]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def checkpoint_steps(t_max: int, count: int = 7) -> list[int]:
    """Step 0 plus ``count - 1`` evenly spaced ends of training blocks.

    For ``t_max = 60000`` this yields 0, 9999, 19999, ..., 59999.
    """
    parts = count - 1
    steps = {0, t_max - 1}
    steps.update(max(0, (i * t_max) // parts - 1) for i in range(1, parts + 1))
    return sorted(steps)


def init_codebook(rng: np.random.Generator, K: int, D: int) -> np.ndarray:
    if K < 1 or D < 1:
        raise ValueError(f"codebook needs K, D >= 1, got K={K}, D={D}")
    return rng.random((K, D))


def draw_index(rng: np.random.Generator, count: int) -> int:
    return min(int(rng.random() * count), count - 1)


def landmark_phase_reachable(p_th: float, M: int) -> bool:
    return p_th > 0 and M > 0


def select_phase(rng: np.random.Generator, p_th: float, M: int) -> Phase:
    """Landmark phase iff a fresh uniform draw is below ``p_th``.

    No number is drawn when the landmark phase cannot happen.
    """
    if not 0 <= p_th < 1:
        raise ConfigError("p_th", f"must satisfy 0 <= p_th < 1, got {p_th}")
    if not landmark_phase_reachable(p_th, M):
        return Phase.DATA_DRIVEN
    return Phase.LANDMARK_DRIVEN if rng.random() < p_th else Phase.DATA_DRIVEN


def _data_params(cfg: TrainConfig) -> tuple:
    return (cfg.a_max, cfg.a_min, float(cfg.tau_a), cfg.sigma_max, cfg.sigma_min, float(cfg.tau_sigma))


def _landmark_params(cfg: TrainConfig) -> tuple:
    if cfg.b_max is None:
        return (0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    return (cfg.b_max, cfg.b_min, float(cfg.t_center), float(cfg.rho_b), cfg.rho_max, cfg.rho_min, float(cfg.tau_rho))


def _check_grid(W: np.ndarray, grid: NodeGrid) -> None:
    if W.shape[0] != grid.size:
        raise ValueError(f"codebook has {W.shape[0]} rows but grid has {grid.size} nodes")


def data_step(codebook, x, t: int, cfg: TrainConfig, grid: NodeGrid) -> np.ndarray:
    """One data-driven update; returns a new codebook."""
    W = _as_codebook(codebook).copy()
    _check_grid(W, grid)
    _kernels.data_update(W, _as_vector(x, W.shape[1]), float(t), *_data_params(cfg), grid.locations)
    return W


def landmark_step(codebook, landmark: tuple, t: int, cfg: TrainConfig, grid: NodeGrid) -> np.ndarray:
    """One landmark-driven update toward ``landmark = (x', node)``."""
    x, node = landmark
    W = _as_codebook(codebook).copy()
    _check_grid(W, grid)
    if not 0 <= node < grid.size:
        raise IndexError(f"landmark node {node} outside grid of {grid.size} nodes")
    if cfg.b_max is None:
        raise ConfigError("b_max", "landmark-phase parameters are not set")
    _kernels.landmark_update(W, _as_vector(x, W.shape[1]), int(node), float(t), *_landmark_params(cfg), grid.locations)
    return W


def _prepare(data, landmarks, cfg, grid):
    X = np.ascontiguousarray(getattr(data, "rows", data), dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("training data must be a non-empty N x D matrix")
    if landmarks is None:
        landmarks = LandmarkSet.empty(X.shape[1])
    grid = grid or cfg.grid
    if grid.size != cfg.kx * cfg.ky:
        raise ConfigError("kx", f"grid {grid.kx}x{grid.ky} does not match config {cfg.kx}x{cfg.ky}")
    if cfg.p_th > 0 and len(landmarks) == 0:
        raise ConfigError("p_th", "p_th > 0 requires at least one landmark")
    landmarks.check(grid, X.shape[1])
    if len(landmarks):
        LX = np.ascontiguousarray(landmarks.data, dtype=np.float64)
    else:
        LX = np.zeros((1, X.shape[1]))
    return X, landmarks, LX, grid


def _draw_block(rng, n_steps, N, M, p_th):
    if landmark_phase_reachable(p_th, M):
        u = rng.random((n_steps, 2))
        is_landmark = u[:, 0] < p_th
        count = np.where(is_landmark, M, N)
        index = np.minimum((u[:, 1] * count).astype(np.int64), count - 1)
    else:
        is_landmark = np.zeros(n_steps, dtype=np.bool_)
        index = np.minimum((rng.random(n_steps) * N).astype(np.int64), N - 1)
    return is_landmark, index


SnapshotSpec = Union[bool, Iterable[int]]


def train(
    data: Union[Dataset, np.ndarray],
    landmarks: Optional[LandmarkSet],
    cfg: TrainConfig,
    grid: Optional[NodeGrid] = None,
    *,
    snapshots: SnapshotSpec = False,
    checkpoints: Optional[Iterable[int]] = None,
) -> tuple[np.ndarray, TrainTrace]:
    """Train a landmark map and return ``(codebook, trace)``.

    Metrics are recorded after the update of each checkpoint step.
    ``snapshots=True`` stores codebook copies at the checkpoints; an iterable
    of steps stores them at exactly those steps instead.
    """
    X, landmarks, LX, grid = _prepare(data, landmarks, cfg, grid)
    N, M = len(X), len(landmarks)
    lnodes = np.ascontiguousarray(landmarks.labels if M else np.zeros(1, dtype=np.int64))
    ckpts = sorted(set(checkpoints)) if checkpoints is not None else checkpoint_steps(cfg.t_max)
    if snapshots is True:
        snap_steps = set(ckpts)
    elif snapshots is False:
        snap_steps = set()
    else:
        snap_steps = set(snapshots)
    stops = sorted({t for t in set(ckpts) | snap_steps if 0 <= t < cfg.t_max} | {cfg.t_max - 1})

    rng = make_rng(cfg.seed)
    W = init_codebook(rng, grid.size, X.shape[1])
    dp, lp = _data_params(cfg), _landmark_params(cfg)
    trace = TrainTrace()
    t = 0
    for stop in stops:
        n_steps = stop + 1 - t
        is_landmark, index = _draw_block(rng, n_steps, N, M, cfg.p_th)
        _kernels.run_steps(W, X, LX, lnodes, grid.locations, t, is_landmark, index, dp, lp)
        t = stop + 1
        if stop in ckpts:
            trace.checkpoints.append(Checkpoint.from_report(stop, error_report(W, X, grid, landmarks if M else None)))
        if stop in snap_steps:
            trace.snapshots.append((stop, W.copy()))
    return W, trace


def train_som(data, cfg: TrainConfig, grid: Optional[NodeGrid] = None, *, record_every_step: bool = False):
    """Plain online SOM, one data step at a time.

    Returns the final codebook and, when requested, the list of codebooks
    after every step.
    """
    X = np.ascontiguousarray(getattr(data, "rows", data), dtype=np.float64)
    grid = grid or cfg.grid
    rng = make_rng(cfg.seed)
    W = init_codebook(rng, grid.size, X.shape[1])
    history = []
    for t in range(cfg.t_max):
        W = data_step(W, X[draw_index(rng, len(X))], t, cfg, grid)
        if record_every_step:
            history.append(W)
    return W, history


def run_many(data, landmarks, cfg: TrainConfig, seeds: Iterable[int], jobs: int = 1):
    """Independent runs over ``seeds``; returns ``[(seed, codebook, trace)]`` in seed order."""
    seeds = list(seeds)
    if jobs <= 1 or len(seeds) <= 1:
        return [(s, *train(data, landmarks, cfg.replace(seed=s))) for s in seeds]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(train, data, landmarks, cfg.replace(seed=s)) for s in seeds]
        return [(s, *f.result()) for s, f in zip(seeds, futures)]

