"""Zoo loader, synthetic vowel-formant generator and min-max scaling.

The Zoo file is the UCI distribution (``zoo.data``): 101 comma-separated rows
of ``name, 16 attributes, type`` without a header. Download it from
https://archive.ics.uci.edu/dataset/111/zoo and pass its path to the CLI.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .core import Dataset

log = logging.getLogger(__name__)

ZOO_ATTRIBUTES = (
    "hair", "feathers", "eggs", "milk", "airborne", "aquatic", "predator", "toothed",
    "backbone", "breathes", "venomous", "fins", "legs", "tail", "domestic", "catsize",
)

# 0-based rows of the UCI file used as landmarks by the Zoo presets
ZOO_LANDMARK_NAMES = {
    21: "duck",
    48: "mink",
    58: "penguin",
    74: "seal",
    75: "sealion",
    80: "slowworm",
    89: "toad",
}

# mean (F1, F2) in Hz of the five Japanese vowels
VOWEL_FORMANTS = {
    "a": (850.0, 1610.0),
    "i": (240.0, 2400.0),
    "u": (300.0, 1390.0),
    "e": (390.0, 2300.0),
    "o": (360.0, 640.0),
}


class ParseError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass
class FeatureScaler:
    """Per-column affine map onto [0, 1] learned from ``fit_scaler``."""

    lo: np.ndarray
    hi: np.ndarray
    constant: list[int] = field(default_factory=list)

    @property
    def span(self) -> np.ndarray:
        s = self.hi - self.lo
        return np.where(s > 0, s, 1.0)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = (X - self.lo) / self.span
        if self.constant:
            out[..., self.constant] = 0.0
        return out

    def inverse(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        out = Z * self.span + self.lo
        if self.constant:
            out[..., self.constant] = self.lo[self.constant]
        return out


def fit_scaler(X) -> FeatureScaler:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] < 1:
        raise ValueError("cannot fit a scaler on zero rows")
    lo, hi = X.min(axis=0), X.max(axis=0)
    constant = [int(j) for j in np.flatnonzero(hi == lo)]
    if constant:
        log.warning("constant columns %s mapped to 0", constant)
    return FeatureScaler(lo, hi, constant)


def _open_text(source) -> TextIO:
    if isinstance(source, (str, os.PathLike)):
        if isinstance(source, str) and "\n" in source:
            return io.StringIO(source)
        return open(source, newline="")
    return source


def read_zoo(source) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Raw Zoo rows: ``(names, attributes[N, 16], types[N])``."""
    fh = _open_text(source)
    names, rows, types = [], [], []
    try:
        for i, fields in enumerate(csv.reader(fh)):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != 18:
                raise ParseError(i + 1, f"expected 18 fields, got {len(fields)}")
            try:
                values = [float(f) for f in fields[1:17]]
                kind = int(fields[17])
            except ValueError as exc:
                raise ParseError(i + 1, f"non-numeric attribute ({exc})") from None
            names.append(fields[0].strip())
            rows.append(values)
            types.append(kind)
    finally:
        if fh is not source:
            fh.close()
    if not rows:
        raise ParseError(0, "no data rows")
    return names, np.array(rows), np.array(types)


def load_zoo(source, *, check_landmarks: bool = True) -> Dataset:
    """Load UCI Zoo as a [0,1]-scaled 16-feature dataset (type column dropped)."""
    names, X, _ = read_zoo(source)
    if check_landmarks and len(names) == 101:
        for row, expected in ZOO_LANDMARK_NAMES.items():
            if names[row] != expected:
                raise ParseError(row + 1, f"expected {expected!r} at 0-based row {row}, found {names[row]!r}")
    return Dataset(fit_scaler(X).transform(X), names)


@dataclass(frozen=True)
class FormantSpec:
    samples_per_vowel: int = 40
    spread: tuple[float, float] = (60.0, 120.0)
    seed: int = 0
    means: tuple = tuple(VOWEL_FORMANTS.items())

    def __post_init__(self):
        if self.samples_per_vowel < 1:
            raise ValueError("samples_per_vowel must be >= 1")
        if min(self.spread) <= 0:
            raise ValueError("spread must be positive")


@dataclass
class FormantData:
    dataset: Dataset
    raw: np.ndarray
    vowel_means: dict[str, np.ndarray]
    scaler: FeatureScaler

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["f1", "f2", "vowel"])
            for (f1, f2), v in zip(self.raw, self.dataset.names):
                w.writerow([repr(float(f1)), repr(float(f2)), v])


def gen_formant(spec: FormantSpec = FormantSpec()) -> FormantData:
    """Gaussian (F1, F2) clusters around the vowel means, scaled to [0,1]^2.

    The scaler is fitted on the samples together with the vowel means so the
    scaled means are guaranteed to fall inside the unit square.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.samples_per_vowel
    means = {v: np.asarray(m, dtype=np.float64) for v, m in spec.means}
    raw, labels = [], []
    for vowel, mu in means.items():
        raw.append(mu + rng.standard_normal((n, 2)) * np.asarray(spec.spread))
        labels.extend([vowel] * n)
    raw = np.vstack(raw)
    scaler = fit_scaler(np.vstack([raw, *means.values()]))
    scaled_means = {v: scaler.transform(m) for v, m in means.items()}
    return FormantData(Dataset(scaler.transform(raw), labels), raw, scaled_means, scaler)

