"""U-matrix, label overlays, PCA projection and file renderers (SVG / CSV)."""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from html import escape
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import NodeGrid, _as_codebook

# blue -> teal -> green -> yellow, roughly perceptually monotone
RAMP = (
    (0.00, (53, 42, 135)),
    (0.25, (15, 116, 212)),
    (0.50, (20, 175, 165)),
    (0.75, (165, 190, 60)),
    (1.00, (249, 251, 14)),
)


def mesh_edges(grid: NodeGrid) -> list[tuple[int, int]]:
    """All lattice-adjacent node pairs ``(i, j)`` with ``i < j``."""
    edges = []
    for y in range(grid.ky):
        for x in range(grid.kx):
            k = x + y * grid.kx
            if x + 1 < grid.kx:
                edges.append((k, k + 1))
            if y + 1 < grid.ky:
                edges.append((k, k + grid.kx))
    return edges


def umatrix(codebook, grid: NodeGrid) -> np.ndarray:
    """``(kx, ky)`` array; entry ``[x, y]`` sums squared codebook distances to the 4-neighbours."""
    W = _as_codebook(codebook)
    if W.shape[0] != grid.size:
        raise ValueError(f"codebook has {W.shape[0]} rows but grid has {grid.size} nodes")
    U = np.zeros(grid.size)
    for i, j in mesh_edges(grid):
        d = float(np.sum((W[i] - W[j]) ** 2))
        U[i] += d
        U[j] += d
    return U.reshape(grid.ky, grid.kx).T.copy()


@dataclass(frozen=True)
class Placement:
    node: int
    names: tuple[str, ...]
    is_landmark: bool = False

    @property
    def multi(self) -> bool:
        return len(self.names) > 1


@dataclass
class LabelOverlay:
    placements: list[Placement]

    def node_of(self, name: str) -> int:
        for p in self.placements:
            if name in p.names:
                return p.node
        raise KeyError(name)


def label_overlay(nodes: Sequence[int], names: Sequence[str], landmark: Optional[Sequence[bool]] = None) -> LabelOverlay:
    """Group names by node. Landmark names get their own flagged placement."""
    if len(nodes) != len(names):
        raise ValueError(f"{len(nodes)} projections for {len(names)} names")
    if landmark is None:
        landmark = [False] * len(names)
    if len(landmark) != len(names):
        raise ValueError("landmark flags do not match names")
    groups: dict[tuple[int, bool], list[str]] = defaultdict(list)
    for node, name, flag in zip(nodes, names, landmark):
        groups[(int(node), bool(flag))].append(name)
    return LabelOverlay([Placement(n, tuple(g), f) for (n, f), g in sorted(groups.items())])


@dataclass
class PcaProjection:
    components: np.ndarray
    mean: np.ndarray
    variances: np.ndarray
    codebook: np.ndarray
    data: np.ndarray
    n_valid: int

    @property
    def padded(self) -> bool:
        return self.n_valid < 3


def pca_fit_project(codebook, data, n_components: int = 3) -> PcaProjection:
    """Fit PCA on the data rows and project data and codebook onto the top components.

    Components are sign-fixed so each one's largest-magnitude coordinate is
    positive. With fewer than ``n_components`` input dimensions the missing
    components are zero vectors (``n_valid`` says how many are real).
    """
    W = _as_codebook(codebook)
    X = np.asarray(getattr(data, "rows", data), dtype=np.float64)
    if X.shape[0] < 2:
        raise ValueError("PCA needs at least two data rows")
    mean = X.mean(axis=0)
    cov = np.cov(X - mean, rowvar=False).reshape(X.shape[1], X.shape[1])
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    n_valid = min(n_components, X.shape[1])
    comps = np.zeros((n_components, X.shape[1]))
    variances = np.zeros(n_components)
    for i in range(n_valid):
        v = evecs[:, i]
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        comps[i] = v
        variances[i] = max(evals[i], 0.0)
    return PcaProjection(comps, mean, variances, (W - mean) @ comps.T, (X - mean) @ comps.T, n_valid)


# ---------------------------------------------------------------- rendering


def ramp_color(v: float) -> str:
    v = min(max(float(v), 0.0), 1.0)
    for (p0, c0), (p1, c1) in zip(RAMP, RAMP[1:]):
        if v <= p1:
            f = (v - p0) / (p1 - p0)
            rgb = [round(a + (b - a) * f) for a, b in zip(c0, c1)]
            return "#%02x%02x%02x" % tuple(rgb)
    return "#%02x%02x%02x" % RAMP[-1][1]


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def umatrix_svg(U: np.ndarray, overlay: Optional[LabelOverlay] = None, cell: float = 24.0) -> str:
    """Heatmap of a ``(kx, ky)`` U-matrix, node y growing downward, optional labels."""
    kx, ky = U.shape
    lo, hi = float(U.min()), float(U.max())
    scale = hi - lo
    body = [f'<rect width="{_fmt(kx * cell)}" height="{_fmt(ky * cell)}" fill="white"/>']
    for y in range(ky):
        for x in range(kx):
            v = (U[x, y] - lo) / scale if scale > 0 else 0.0
            k = x + y * kx
            body.append(
                f'<rect x="{_fmt(x * cell)}" y="{_fmt(y * cell)}" width="{_fmt(cell)}" height="{_fmt(cell)}" '
                f'fill="{ramp_color(v)}"><title>node {k}: {U[x, y]:.6g}</title></rect>'
            )
    if overlay is not None:
        font = cell * 0.4
        stacked: dict[int, int] = defaultdict(int)
        for p in overlay.placements:
            x, y = p.node % kx, p.node // kx
            row = stacked[p.node]
            stacked[p.node] += 1
            text = p.names[0] + ("." if p.multi else "")
            color = "yellow" if p.is_landmark else "white"
            weight = ' font-weight="bold"' if p.is_landmark else ""
            body.append(
                f'<text x="{_fmt((x + 0.5) * cell)}" y="{_fmt((y + 0.55) * cell + row * font)}" '
                f'font-size="{_fmt(font)}" font-family="sans-serif" text-anchor="middle" fill="{color}"{weight}>'
                f"{escape(text)}<title>{escape(', '.join(p.names))}</title></text>"
            )
    return _svg(kx * cell, ky * cell, body)


def mesh_svg(
    proj: PcaProjection,
    edges: Sequence[tuple[int, int]],
    labels: Optional[Sequence[tuple[str, Sequence[float], bool]]] = None,
    size: float = 600.0,
) -> str:
    """Codebook mesh and data scattered on the first two principal components.

    ``labels`` are ``(text, pca_coordinates, is_landmark)`` triples.
    """
    pts = np.vstack([proj.codebook[:, :2], proj.data[:, :2]])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    pad = 30.0

    def xy(p):
        q = (np.asarray(p[:2], dtype=np.float64) - lo) / span
        return pad + q[0] * (size - 2 * pad), size - pad - q[1] * (size - 2 * pad)

    body = [f'<rect width="{_fmt(size)}" height="{_fmt(size)}" fill="white"/>']
    for p in proj.data:
        x, y = xy(p)
        body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="#1f4fd1"/>')
    for i, j in edges:
        (x1, y1), (x2, y2) = xy(proj.codebook[i]), xy(proj.codebook[j])
        body.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="red" stroke-width="0.8"/>'
        )
    for text, coords, is_landmark in labels or ():
        x, y = xy(coords)
        fill = "#d4a000" if is_landmark else "black"
        body.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y - 4)}" font-size="11" font-family="sans-serif" '
            f'text-anchor="middle" fill="{fill}">{escape(text)}</text>'
        )
    return _svg(size, size, body)


def curves_svg(steps: Sequence[int], series: dict[str, Sequence[float]], title: str = "", size=(480.0, 320.0)) -> str:
    """Line chart of metric curves over checkpoint steps."""
    w, h = size
    pad = 40.0
    vals = np.array([v for s in series.values() for v in s if np.isfinite(v)] or [0.0])
    lo, hi = float(vals.min()), float(vals.max())
    if hi <= lo:
        hi = lo + 1.0
    t0, t1 = min(steps), max(steps)
    tspan = (t1 - t0) or 1

    def xy(t, v):
        return pad + (t - t0) / tspan * (w - 2 * pad), h - pad - (v - lo) / (hi - lo) * (h - 2 * pad)

    palette = ("#1f4fd1", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    body = [
        f'<rect width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
        f'<text x="{_fmt(w / 2)}" y="20" font-size="13" font-family="sans-serif" text-anchor="middle">{escape(title)}</text>',
        f'<line x1="{_fmt(pad)}" y1="{_fmt(h - pad)}" x2="{_fmt(w - pad)}" y2="{_fmt(h - pad)}" stroke="black"/>',
        f'<line x1="{_fmt(pad)}" y1="{_fmt(pad)}" x2="{_fmt(pad)}" y2="{_fmt(h - pad)}" stroke="black"/>',
        f'<text x="{_fmt(pad - 4)}" y="{_fmt(pad)}" font-size="10" text-anchor="end">{hi:.3g}</text>',
        f'<text x="{_fmt(pad - 4)}" y="{_fmt(h - pad)}" font-size="10" text-anchor="end">{lo:.3g}</text>',
        f'<text x="{_fmt(w - pad)}" y="{_fmt(h - pad + 14)}" font-size="10" text-anchor="end">t={t1}</text>',
    ]
    for i, (name, s) in enumerate(series.items()):
        color = palette[i % len(palette)]
        pts = [xy(t, v) for t, v in zip(steps, s) if np.isfinite(v)]
        if not pts:
            continue
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        body.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(
            f'<text x="{_fmt(w - pad)}" y="{_fmt(pad + 14 * i)}" font-size="11" text-anchor="end" fill="{color}">'
            f"{escape(name)}</text>"
        )
    return _svg(w, h, body)


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def write_matrix_csv(path, M: np.ndarray, header: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        for row in np.atleast_2d(M):
            w.writerow([repr(float(v)) for v in row])
    return path


def read_matrix_csv(path, header: bool = False) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
