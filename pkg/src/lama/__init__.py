"""Landmark map (LAMA): a self-organizing map steered by landmark node/datum pairs."""

from .core import Dataset, LandmarkSet, NodeGrid, node_location, project_all, winner, winner_pair
from .datasets import FormantSpec, gen_formant, load_zoo
from .metrics import ErrorReport, error_report, qed, qel, ste, te
from .presets import PRESETS, get_preset, resolve_landmarks
from .schedules import ConfigError, TrainConfig, neigh_a, neigh_b, rate_a, rate_b, spread_rho, spread_sigma
from .trainer import Phase, TrainTrace, data_step, init_codebook, landmark_step, make_rng, select_phase, run_many, train, train_som
from .viz import label_overlay, pca_fit_project, umatrix

__version__ = "0.1.0"
