"""Acceptance suite: one test per criterion, summarised at the end of the run.

The multi-seed sweeps (20 seeds for each of the seven presets) are computed
once per session and shared by criteria 5 to 10.
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import ZOO_PATH, replay
from lama.cli import load_experiment, main
from lama.core import LandmarkSet, NodeGrid, chebyshev, winner
from lama.metrics import error_report, qed, qel, ste, te
from lama.presets import PRESETS, get_preset
from lama.schedules import neigh_a, rate_a, rate_b, spread_rho, spread_sigma
from lama.trainer import run_many, train, train_som
from lama.viz import umatrix

SEEDS = range(20)
ZOO = ("zoo-som", "zoo-lama1", "zoo-lama2", "zoo-lama3", "zoo-lama4")
FORMANT = ("formant-som", "formant-lama")


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def measured(record_property, text):
    record_property("measured", text)
    print(text)


class Sweep:
    def __init__(self, name):
        self.exp = load_experiment(name, data_path=str(ZOO_PATH))
        t0 = time.perf_counter()
        self.runs = run_many(self.exp.data, self.exp.landmarks, self.exp.config, SEEDS)
        self.seconds = time.perf_counter() - t0

    def mean(self, metric):
        return np.mean([tr.series(metric) for _, _, tr in self.runs], axis=0)

    def hits(self, m, radius):
        """Seeds whose final winner for landmark ``m`` is within ``radius`` of its node."""
        lm, grid = self.exp.landmarks, self.exp.config.grid
        node = int(lm.labels[m])
        return sum(chebyshev(grid, winner(W, lm.data[m]), node) <= radius for _, W, _ in self.runs)


@pytest.fixture(scope="session")
def sweeps():
    return {name: Sweep(name) for name in ZOO + FORMANT}


# ----------------------------------------------------------------- exact


@criterion(1, "SOM reduction is bit-identical to the plain SOM path")
def test_som_reduction(record_property):
    rng = np.random.default_rng(0)
    X = rng.random((30, 4))
    cfg = get_preset("zoo-som").config.replace(kx=6, ky=5, t_max=2000, seed=13)
    t0 = time.perf_counter()
    W, trace = train(X, LandmarkSet.empty(4), cfg.replace(p_th=0.0), snapshots=range(cfg.t_max))
    W_ref, history = train_som(X, cfg, record_every_step=True)
    elapsed = time.perf_counter() - t0
    identical = all(np.array_equal(a, b) for (_, a), b in zip(trace.snapshots, history))
    measured(record_property, f"{cfg.t_max} steps identical={identical} in {elapsed:.3f}s")
    assert len(history) == cfg.t_max and identical and np.array_equal(W, W_ref)
    assert elapsed < 1.0


@criterion(2, "metrics match brute-force recomputation within 1e-12")
def test_metric_oracles(record_property):
    rng = np.random.default_rng(2024)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(100):
        kx = int(rng.integers(2, 5))
        ky = int(rng.integers(1, 16 // kx + 1))
        K, N, D = kx * ky, int(rng.integers(1, 21)), int(rng.integers(1, 6))
        g = NodeGrid(kx, ky)
        W, X = rng.random((K, D)), rng.random((N, D))
        nodes = rng.choice(K, size=int(rng.integers(1, K + 1)), replace=False)
        lm = LandmarkSet(rng.random((len(nodes), D)), nodes)
        Wl, Xl = W.tolist(), X.tolist()
        errs = (
            qed(W, X) - oracles.qed(Wl, Xl),
            qel(W, lm) - oracles.qel(Wl, lm.data.tolist(), lm.labels.tolist()),
            te(W, X, g) - oracles.topo_error(Wl, Xl, kx, 1.01),
            ste(W, X, g) - oracles.topo_error(Wl, Xl, kx, math.sqrt(2) + 0.01),
        )
        worst = max(worst, *map(abs, errs))
    elapsed = time.perf_counter() - t0
    measured(record_property, f"max abs error {worst:.2e} over 100 instances in {elapsed:.2f}s")
    assert worst <= 1e-12 and elapsed < 5.0


@criterion(3, "schedule boundary values and monotonicity")
def test_schedule_boundaries(record_property):
    ts = np.sort(np.random.default_rng(3).choice(60000, 1000, replace=False))
    checked = 0
    for p in PRESETS.values():
        cfg, g = p.config, p.config.grid
        assert rate_a(0, cfg) == cfg.a_max
        for k in (0, g.size // 2, g.size - 1):
            for t in (0, 1234, 59999):
                assert neigh_a(k, k, t, cfg, g) == rate_a(t, cfg)
        series = [rate_a, spread_sigma]
        if cfg.p_th > 0:
            assert rate_b(cfg.t_center, cfg) == cfg.b_max
            series.append(spread_rho)
        for f in series:
            v = np.array([f(int(t), cfg) for t in ts])
            assert np.all(np.diff(v) < 0), (p.name, f.__name__)
        checked += 1
    measured(record_property, f"{checked} presets, 1000 sampled steps each")


@criterion(4, "codebook stays inside [0,1] over a full zoo-lama4 run")
def test_boundedness(record_property):
    exp = load_experiment("zoo-lama4", data_path=str(ZOO_PATH))
    lo, hi = [math.inf], [-math.inf]

    def check(t, W):
        lo[0] = min(lo[0], W.min())
        hi[0] = max(hi[0], W.max())

    W = replay(exp.data.rows, exp.landmarks, exp.config, check)
    # the step-by-step replay is the same trajectory as the fused trainer
    assert np.array_equal(W, train(exp.data, exp.landmarks, exp.config)[0])
    measured(record_property, f"entries in [{lo[0]:.6f}, {hi[0]:.6f}] over {exp.config.t_max} steps")
    assert lo[0] >= 0.0 and hi[0] <= 1.0


# ---------------------------------------------------------------- sweeps


@criterion(5, "Zoo mean QED descends (20 seeds, +0.01 slack, <= 5 min)")
def test_zoo_descending_qed(sweeps, record_property):
    total = sum(sweeps[n].seconds for n in ZOO)
    worst = -math.inf
    for name in ZOO:
        q = sweeps[name].mean("qed")
        measured(record_property, f"{name} " + " ".join(f"{v:.4f}" for v in q))
        worst = max(worst, float(np.max(np.diff(q))))
    measured(record_property, f"largest rise {worst:.4f}; 100 zoo runs in {total:.1f}s")
    assert worst <= 0.01
    assert total <= 300.0


@criterion(6, "Zoo final mean QEL < 3.12 for LAMA1, LAMA3, LAMA4")
def test_zoo_qel_level(sweeps, record_property):
    finals = {n: float(sweeps[n].mean("qel")[-1]) for n in ("zoo-lama1", "zoo-lama3", "zoo-lama4")}
    measured(record_property, ", ".join(f"{n}={v:.4f}" for n, v in finals.items()))
    assert all(v < 3.12 for v in finals.values())


@criterion(7, "Zoo SOM final QED <= every LAMA final QED + 0.02")
def test_zoo_som_lowest_qed(sweeps, record_property):
    finals = {n: float(sweeps[n].mean("qed")[-1]) for n in ZOO}
    measured(record_property, ", ".join(f"{n}={v:.4f}" for n, v in finals.items()))
    assert all(finals["zoo-som"] <= finals[n] + 0.02 for n in ZOO[1:])


@criterion(8, "formant SOM final mean STE < 0.08")
def test_formant_som_ste(sweeps, record_property):
    v = float(sweeps["formant-som"].mean("ste")[-1])
    measured(record_property, f"formant-som final STE {v:.4f}")
    assert v < 0.08


@criterion(9, "landmark data land near their nodes in >= 80% of seeds")
def test_landmark_placement(sweeps, record_property):
    zoo = sweeps["zoo-lama1"]
    m = list(zoo.exp.landmarks.names).index("sealion")
    sealion = zoo.hits(m, 3)
    formant = sweeps["formant-lama"]
    vowels = {name: formant.hits(i, 2) for i, name in enumerate(formant.exp.landmarks.names)}
    n = len(SEEDS)
    measured(record_property, f"sealion {sealion}/{n}; " + ", ".join(f"{k} {v}/{n}" for k, v in vowels.items()))
    assert sealion >= 0.8 * n
    assert sorted(int(x) for x in formant.exp.landmarks.labels) == [0, 4, 41, 49, 94]
    assert all(v >= 0.8 * n for v in vowels.values())


@criterion(10, "STE <= TE on every evaluated map")
def test_ste_le_te(sweeps, record_property):
    count = 0
    for sw in sweeps.values():
        for _, W, tr in sw.runs:
            for c in tr.checkpoints:
                assert c.ste <= c.te
                count += 1
            r = error_report(W, sw.exp.data, sw.exp.config.grid)
            assert r.ste <= r.te
            count += 1
    rng = np.random.default_rng(10)
    for _ in range(200):
        g = NodeGrid(int(rng.integers(2, 6)), int(rng.integers(2, 6)))
        W, X = rng.random((g.size, 3)), rng.random((15, 3))
        assert ste(W, X, g) <= te(W, X, g)
        count += 1
    measured(record_property, f"{count} maps checked")


# ------------------------------------------------------------------ misc


@criterion(11, "U-matrix hand example and neighbour-scan oracle")
def test_umatrix(record_property):
    W = np.zeros((4, 5))
    W[0, 0] = 1.0
    U = umatrix(W, NodeGrid(2, 2))
    assert [U[0, 0], U[1, 0], U[0, 1], U[1, 1]] == [2.0, 1.0, 1.0, 0.0]
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        W = rng.random((25, 4))
        worst = max(worst, float(np.max(np.abs(umatrix(W, NodeGrid(5, 5)) - oracles.umatrix(W.tolist(), 5, 5)))))
    measured(record_property, f"2x2 exact; 5x5 max abs error {worst:.1e}")
    assert worst <= 1e-12


@criterion(12, "train --preset zoo-lama2 --seed 7 is byte-identical across runs")
def test_cli_determinism(tmp_path, record_property):
    for run in ("a", "b"):
        args = ["train", "--preset", "zoo-lama2", "--seed", "7", "--data", str(ZOO_PATH), "--out", str(tmp_path / run)]
        assert main(args) == 0
    same = {f: (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
            for f in ("trace.csv", "codebook.csv")}
    measured(record_property, ", ".join(f"{f} identical={v}" for f, v in same.items()))
    assert all(same.values())
