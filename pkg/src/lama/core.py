"""Grid geometry, codebook/data containers and winner-node queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class NodeGrid:
    """Square lattice of ``kx * ky`` nodes with unit spacing.

    Node ``k`` sits at ``(k % kx, k // kx)``.
    """

    kx: int
    ky: int

    def __post_init__(self):
        if int(self.kx) != self.kx or int(self.ky) != self.ky or self.kx < 1 or self.ky < 1:
            raise ValueError(f"grid sizes must be positive integers, got {self.kx}x{self.ky}")

    @property
    def size(self) -> int:
        return self.kx * self.ky

    @cached_property
    def locations(self) -> np.ndarray:
        k = np.arange(self.size)
        loc = np.column_stack([k % self.kx, k // self.kx]).astype(np.float64)
        loc.setflags(write=False)
        return loc

    def location(self, k: int) -> np.ndarray:
        return node_location(k, self)

    def index(self, x: int, y: int) -> int:
        if not (0 <= x < self.kx and 0 <= y < self.ky):
            raise IndexError(f"({x}, {y}) outside {self.kx}x{self.ky} grid")
        return x + y * self.kx

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.location(i) - self.location(j)))


def node_location(k: int, grid: NodeGrid) -> np.ndarray:
    if not 0 <= k < grid.size:
        raise IndexError(f"node {k} out of range for {grid.size} nodes")
    return grid.locations[k].copy()


@dataclass
class Dataset:
    rows: np.ndarray
    names: Optional[list[str]] = None

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=np.float64))
        if self.rows.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if not np.all(np.isfinite(self.rows)):
            raise ValueError("dataset contains non-finite values")
        if self.names is not None:
            self.names = list(self.names)
            if len(self.names) != len(self.rows):
                raise ValueError(f"{len(self.names)} names for {len(self.rows)} rows")

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


@dataclass
class LandmarkSet:
    """Landmark data ``data[m]`` paired with node ``labels[m]``."""

    data: np.ndarray
    labels: np.ndarray
    names: Optional[list[str]] = field(default=None)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim == 1:
            data = data.reshape(len(self.labels), -1) if len(self.labels) else data.reshape(0, 0)
        self.data = data
        if data.ndim != 2 or len(data) != len(self.labels):
            raise ValueError(f"{len(self.data)} landmark vectors for {len(self.labels)} labels")
        if len(set(self.labels.tolist())) != len(self.labels):
            raise ValueError(f"landmark nodes must be distinct, got {self.labels.tolist()}")
        if self.names is not None and len(self.names) != len(self.labels):
            raise ValueError("landmark names do not match landmark count")

    @classmethod
    def empty(cls, dim: int = 0) -> "LandmarkSet":
        return cls(np.zeros((0, dim)), np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.labels)

    def check(self, grid: NodeGrid, dim: Optional[int] = None) -> None:
        bad = [int(l) for l in self.labels if not 0 <= l < grid.size]
        if bad:
            raise IndexError(f"landmark nodes {bad} outside grid of {grid.size} nodes")
        if dim is not None and len(self) and self.data.shape[1] != dim:
            raise ValueError(f"landmark dimension {self.data.shape[1]} != data dimension {dim}")


def _as_codebook(codebook) -> np.ndarray:
    W = np.ascontiguousarray(codebook, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] < 1:
        raise ValueError(f"codebook must be a non-empty K x D matrix, got shape {W.shape}")
    return W


def _as_vector(x, dim: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (dim,):
        raise ValueError(f"expected a vector of length {dim}, got shape {x.shape}")
    return x


def _as_rows(data, dim: int) -> np.ndarray:
    X = np.ascontiguousarray(getattr(data, "rows", data), dtype=np.float64)
    X = np.atleast_2d(X)
    if X.shape[1] != dim:
        raise ValueError(f"data dimension {X.shape[1]} != codebook dimension {dim}")
    return X


def winner(codebook, x) -> int:
    """Index of the nearest codebook row; ties go to the lowest index."""
    W = _as_codebook(codebook)
    return int(_kernels.winner(W, _as_vector(x, W.shape[1])))


def winner_pair(codebook, x) -> tuple[int, int]:
    W = _as_codebook(codebook)
    if W.shape[0] < 2:
        raise ValueError("winner_pair needs at least two nodes")
    a, b = _kernels.winner_pair(W, _as_vector(x, W.shape[1]))
    return int(a), int(b)


def project_all(codebook, data) -> np.ndarray:
    W = _as_codebook(codebook)
    return _kernels.winners(W, _as_rows(data, W.shape[1]))


def winner_pairs(codebook, data) -> np.ndarray:
    """``(N, 2)`` array of first and second winners for every row."""
    W = _as_codebook(codebook)
    if W.shape[0] < 2:
        raise ValueError("winner pairs need at least two nodes")
    return _kernels.winner_pairs(W, _as_rows(data, W.shape[1]))


def chebyshev(grid: NodeGrid, i: int, j: int) -> int:
    a, b = grid.locations[i], grid.locations[j]
    return int(np.max(np.abs(a - b)))


__all__: Sequence[str] = [
    "NodeGrid",
    "Dataset",
    "LandmarkSet",
    "node_location",
    "winner",
    "winner_pair",
    "project_all",
    "winner_pairs",
    "chebyshev",
]
