"""Quantization and topographic error indices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import LandmarkSet, NodeGrid, _as_codebook, _as_rows, project_all, winner_pairs

# margin added to both adjacency thresholds
EPSILON = 0.01
# lattice spacing; diagonal neighbours sit at sqrt(2) times this
D_TE = 1.0
D_STE = math.sqrt(2.0) * D_TE


@dataclass(frozen=True)
class ErrorReport:
    qed: float
    qel: Optional[float]
    te: float
    ste: float


def qed(codebook, data) -> float:
    """Mean (unsquared) distance from each datum to its winner's codebook vector."""
    W = _as_codebook(codebook)
    X = _as_rows(data, W.shape[1])
    if len(X) == 0:
        raise ValueError("qed of an empty dataset is undefined")
    nearest = W[project_all(W, X)]
    return float(np.mean(np.sqrt(np.sum((X - nearest) ** 2, axis=1))))


def qel(codebook, landmarks: LandmarkSet) -> float:
    """Mean distance from each landmark datum to its assigned node's codebook vector."""
    W = _as_codebook(codebook)
    if len(landmarks) == 0:
        raise ValueError("qel needs at least one landmark")
    LX = _as_rows(landmarks.data, W.shape[1])
    return float(np.mean(np.sqrt(np.sum((LX - W[landmarks.labels]) ** 2, axis=1))))


def _pair_distances(codebook, data, grid: NodeGrid) -> np.ndarray:
    W = _as_codebook(codebook)
    if W.shape[0] != grid.size:
        raise ValueError(f"codebook has {W.shape[0]} rows but grid has {grid.size} nodes")
    pairs = winner_pairs(W, data)
    loc = grid.locations
    return np.sqrt(np.sum((loc[pairs[:, 1]] - loc[pairs[:, 0]]) ** 2, axis=1))


def te(codebook, data, grid: NodeGrid) -> float:
    """Fraction of data whose two best nodes are farther apart than one lattice step."""
    return float(np.mean(_pair_distances(codebook, data, grid) > D_TE + EPSILON))


def ste(codebook, data, grid: NodeGrid) -> float:
    """Like :func:`te` but diagonal neighbours count as adjacent."""
    return float(np.mean(_pair_distances(codebook, data, grid) > D_STE + EPSILON))


def error_report(codebook, data, grid: NodeGrid, landmarks: Optional[LandmarkSet] = None) -> ErrorReport:
    d = _pair_distances(codebook, data, grid)
    return ErrorReport(
        qed=qed(codebook, data),
        qel=qel(codebook, landmarks) if landmarks is not None and len(landmarks) else None,
        te=float(np.mean(d > D_TE + EPSILON)),
        ste=float(np.mean(d > D_STE + EPSILON)),
    )
