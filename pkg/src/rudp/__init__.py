"""Robust unsupervised discriminative projection with typicality-aware graph learning."""

from .baselines import kmeans, pca_project
from .core import ConvergenceError, FitResult, Hyperparams, ModelState, fit, objective
from .data import CorruptionSpec, Dataset, load_csv, standardize, synth_clusters
from .estimator import RUDP
from .metrics import EvalReport, ari, evaluate, hungarian_accuracy, nmi, purity

__all__ = [
    "RUDP", "Hyperparams", "ModelState", "FitResult", "ConvergenceError", "fit", "objective",
    "kmeans", "pca_project", "Dataset", "CorruptionSpec", "load_csv", "standardize",
    "synth_clusters", "EvalReport", "evaluate", "hungarian_accuracy", "nmi", "purity", "ari",
]
__version__ = "0.1.0"
