"""Fair classification when the protected attribute is observed through flipping noise."""

from .baselines import randomized_labeling, train_naive_fair, train_unconstrained
from .classifier import LinearClassifier
from .constraints import ConstraintConfig, DenoisedConstraint, ConstraintSet, denoised_estimates
from .data import DatasetSchema, LabeledDataset, from_arrays, load_csv, save_csv, split
from .estimators import DenoisedFairClassifier, NaiveFairClassifier, UnconstrainedLogisticRegression
from .metrics import FALSE_DISCOVERY_RATE, FALSE_POSITIVE_RATE, STATISTICAL_RATE, empirical_rates, fairness, get_metric, omega
from .noise import NoiseMatrix, binary_from_etas, build_noise_matrix, identity, inject_noise
from .solver import SolverConfig, SolveResult, Status, minimize_constrained
from .synthetic import SyntheticSpec, make_synthetic
from .training import Surrogate, train_denoised

__version__ = "0.1.0"

__all__ = [
    "ConstraintConfig", "ConstraintSet", "DatasetSchema", "DenoisedConstraint", "DenoisedFairClassifier",
    "FALSE_DISCOVERY_RATE", "FALSE_POSITIVE_RATE", "LabeledDataset", "LinearClassifier", "NaiveFairClassifier",
    "NoiseMatrix", "STATISTICAL_RATE", "SolveResult", "SolverConfig", "Status", "Surrogate", "SyntheticSpec",
    "UnconstrainedLogisticRegression", "binary_from_etas", "build_noise_matrix", "denoised_estimates",
    "empirical_rates", "fairness", "from_arrays", "get_metric", "identity", "inject_noise", "load_csv",
    "make_synthetic", "minimize_constrained", "omega", "randomized_labeling", "save_csv", "split",
    "train_denoised", "train_naive_fair", "train_unconstrained",
]
