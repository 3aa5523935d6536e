"""Command-line front end: ``lama {presets,train,sweep,export}``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import viz
from .core import Dataset, LandmarkSet, project_all, winner
from .datasets import FormantData, FormantSpec, gen_formant, load_zoo
from .presets import PRESETS, format_config, get_preset, parse_config, resolve_landmarks
from .schedules import ConfigError, TrainConfig
from .trainer import TrainTrace, run_many, train

log = logging.getLogger("lama")

METRICS = ("qed", "qel", "te", "ste")
ZOO_ENV = "LAMA_ZOO_DATA"


@dataclass
class Experiment:
    name: str
    dataset_kind: str
    config: TrainConfig
    data: Dataset
    landmarks: LandmarkSet
    formant: Optional[FormantData] = None


def load_experiment(
    preset: Optional[str] = None,
    config_path: Optional[str] = None,
    data_path: Optional[str] = None,
    seed: Optional[int] = None,
    data_seed: int = 0,
) -> Experiment:
    if (preset is None) == (config_path is None):
        raise ConfigError("preset", "give exactly one of --preset or --config")
    if preset is not None:
        p = get_preset(preset)
        name, kind, cfg = p.name, p.dataset, p.config
    else:
        cfg, kind = parse_config(Path(config_path).read_text())
        name = Path(config_path).stem
        if kind is None:
            kind = "formant" if any(isinstance(k, str) for k, _ in cfg.landmarks) else "zoo"
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    formant = None
    if kind == "zoo":
        path = data_path or os.environ.get(ZOO_ENV)
        if not path:
            raise FileNotFoundError(f"Zoo data needed: pass --data path/to/zoo.data or set {ZOO_ENV}")
        data = load_zoo(path)
    elif kind == "formant":
        formant = gen_formant(FormantSpec(seed=data_seed))
        data = formant.dataset
    else:
        raise ConfigError("dataset", f"unknown dataset {kind!r} (zoo or formant)")
    landmarks = resolve_landmarks(cfg, data, formant)
    return Experiment(name, kind, cfg, data, landmarks, formant)


# ------------------------------------------------------------------ artifacts


def write_trace_csv(path, trace: TrainTrace, seed: int) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "step", *METRICS])
        for c in trace.checkpoints:
            w.writerow([seed, c.t, *("" if getattr(c, m) is None else repr(getattr(c, m)) for m in METRICS)])
    return Path(path)


def _overlay_items(exp: Experiment, W: np.ndarray):
    """Node, name and landmark flag for every label shown on the map."""
    names = exp.data.names or [str(i) for i in range(len(exp.data))]
    nodes = list(project_all(W, exp.data))
    flags = [False] * len(names)
    names = list(names)
    for key, _ in exp.config.landmarks:
        if isinstance(key, int):
            flags[key] = True
    if exp.formant is not None:
        for i, (key, _) in enumerate(exp.config.landmarks):
            if isinstance(key, str):
                nodes.append(winner(W, exp.landmarks.data[i]))
                names.append(exp.landmarks.names[i])
                flags.append(True)
    return nodes, names, flags


def write_map_artifacts(out: Path, exp: Experiment, W: np.ndarray) -> list[Path]:
    grid = exp.config.grid
    U = viz.umatrix(W, grid)
    nodes, names, flags = _overlay_items(exp, W)
    overlay = viz.label_overlay(nodes, names, flags)
    proj = viz.pca_fit_project(W, exp.data)
    written = [
        viz.write_matrix_csv(out / "codebook.csv", W),
        viz.write_matrix_csv(out / "umatrix.csv", U),
        viz.write_text(out / "umatrix.svg", viz.umatrix_svg(U)),
        viz.write_text(out / "overlay.svg", viz.umatrix_svg(U, overlay)),
    ]
    lm_coords = (exp.landmarks.data - proj.mean) @ proj.components.T if len(exp.landmarks) else np.zeros((0, 3))
    labels = [(n, c, True) for n, c in zip(exp.landmarks.names or [], lm_coords)]
    written.append(viz.write_text(out / "mesh.svg", viz.mesh_svg(proj, viz.mesh_edges(grid), labels)))
    with open(out / "pca.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "index", "name", "pc1", "pc2", "pc3"])
        for k, row in enumerate(proj.codebook):
            w.writerow(["codebook", k, "", *(repr(float(v)) for v in row)])
        for n, row in enumerate(proj.data):
            w.writerow(["data", n, exp.data.names[n] if exp.data.names else "", *(repr(float(v)) for v in row)])
        for m, row in enumerate(lm_coords):
            w.writerow(["landmark", m, exp.landmarks.names[m], *(repr(float(v)) for v in row)])
    written.append(out / "pca.csv")
    if exp.formant is not None:
        exp.formant.write_csv(out / "formant.csv")
        written.append(out / "formant.csv")
    return written


# ------------------------------------------------------------------- commands


def cmd_presets(args) -> int:
    for name, p in PRESETS.items():
        c = p.config
        lm = ", ".join(f"{k}:{n}" for k, n in c.landmarks) or "-"
        print(f"{name:13s} {p.dataset:8s} {c.kx}x{c.ky} t_max={c.t_max} p_th={c.p_th} landmarks={lm}")
    return 0


def cmd_train(args) -> int:
    exp = load_experiment(args.preset, args.config, args.data, args.seed, args.data_seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    W, trace = train(exp.data, exp.landmarks, exp.config, snapshots=args.snapshots)
    log.info("trained %s (seed %d) in %.1fs", exp.name, exp.config.seed, time.perf_counter() - t0)
    viz.write_text(out / "config.txt", format_config(exp.config, exp.dataset_kind))
    write_trace_csv(out / "trace.csv", trace, exp.config.seed)
    write_map_artifacts(out, exp, W)
    for t, snap in trace.snapshots:
        viz.write_matrix_csv(out / "snapshots" / f"codebook_t{t}.csv", snap)
    c = trace.final
    qel = "-" if c.qel is None else f"{c.qel:.4f}"
    print(f"{exp.name} seed={exp.config.seed} t={c.t} qed={c.qed:.4f} qel={qel} te={c.te:.4f} ste={c.ste:.4f}")
    return 0


def sweep_means(traces: Sequence[TrainTrace]) -> tuple[list[int], dict[str, np.ndarray]]:
    steps = traces[0].steps
    if any(t.steps != steps for t in traces):
        raise ValueError("runs have different checkpoint steps")
    means = {m: np.mean([t.series(m) for t in traces], axis=0) for m in METRICS}
    return steps, means


def cmd_sweep(args) -> int:
    if args.runs < 1:
        raise ConfigError("runs", "must be >= 1")
    exp = load_experiment(args.preset, args.config, args.data, None, args.data_seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = list(range(args.seed, args.seed + args.runs))
    t0 = time.perf_counter()
    results = run_many(exp.data, exp.landmarks, exp.config, seeds, jobs=args.jobs)
    log.info("%d runs of %s in %.1fs", len(seeds), exp.name, time.perf_counter() - t0)
    traces = [tr for _, _, tr in results]
    steps, means = sweep_means(traces)
    with open(out / "sweep_runs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "step", "value", "seed"])
        for seed, _, tr in results:
            for c in tr.checkpoints:
                for m in METRICS:
                    v = getattr(c, m)
                    if v is not None:
                        w.writerow([m, c.t, repr(v), seed])
    with open(out / "sweep_means.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", *METRICS, "runs"])
        for i, t in enumerate(steps):
            w.writerow([t, *("" if np.isnan(means[m][i]) else repr(float(means[m][i])) for m in METRICS), len(traces)])
    for m in METRICS:
        if not np.all(np.isnan(means[m])):
            viz.write_text(out / f"sweep_{m}.svg", viz.curves_svg(steps, {exp.name: means[m]}, f"mean {m.upper()}"))
    viz.write_text(out / "config.txt", format_config(exp.config, exp.dataset_kind))
    for i, t in enumerate(steps):
        qel = "-" if np.isnan(means["qel"][i]) else f"{means['qel'][i]:.4f}"
        print(f"t={t:6d} qed={means['qed'][i]:.4f} qel={qel} ste={means['ste'][i]:.4f}")
    return 0


def cmd_export(args) -> int:
    exp = load_experiment(args.preset, args.config, args.data, None, args.data_seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    W = viz.read_matrix_csv(args.codebook)
    if W.shape != (exp.config.grid.size, exp.data.dim):
        raise ConfigError("codebook", f"shape {W.shape} does not match {exp.config.grid.size}x{exp.data.dim}")
    write_map_artifacts(out, exp, W)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lama", description="Landmark map training and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list experiment presets")

    def common(p, seed_help):
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--data", help=f"path to UCI zoo.data (or set {ZOO_ENV})")
        p.add_argument("--data-seed", type=int, default=0, help="seed of the generated formant dataset")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("-v", "--verbose", action="store_true", help="log timings")
        if seed_help:
            p.add_argument("--seed", type=int, help=seed_help)

    p = sub.add_parser("train", help="train one map and write its artifacts")
    common(p, "training seed (overrides the config)")
    p.add_argument("--snapshots", action="store_true", help="also write codebooks at every checkpoint")

    p = sub.add_parser("sweep", help="train with consecutive seeds and average the checkpoint metrics")
    common(p, None)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("export", help="render artifacts from a saved codebook.csv")
    common(p, None)
    p.add_argument("--codebook", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, format="%(message)s")
    handler = {"presets": cmd_presets, "train": cmd_train, "sweep": cmd_sweep, "export": cmd_export}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"lama: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"lama: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
