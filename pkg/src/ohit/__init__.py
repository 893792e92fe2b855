"""OHIT: minority oversampling for high-dimensional imbalanced time series.

Clusters the minority class with density-ratio SNN clustering, estimates a
shrinkage covariance per cluster and draws synthetic samples from the
resulting Gaussians. Also ships ROS/SMOTE baselines and an evaluation
harness (k-NN classifier, F1/G-mean/AUC, Wilcoxon signed-rank tests).
"""

from .baselines import random_oversample, smote
from .datasets import BinaryDataset, LabeledSeriesSet, binarize, class_stats, load_series, write_series
from .drsnn import ClusterLabeling, drsnn
from .evaluation import auc, benchmark, confusion, knn_classify, metrics, wilcoxon_signed_rank
from .pipeline import OhitConfig, fit_ohit, ohit, resample_dataset
from .shrinkage import ShrinkageEstimate, shrink_covariance, shrinkage_intensity
from .synthesis import SyntheticSet, allocate, sample_gaussian, synthesize

__all__ = [
    "BinaryDataset",
    "ClusterLabeling",
    "LabeledSeriesSet",
    "OhitConfig",
    "ShrinkageEstimate",
    "SyntheticSet",
    "allocate",
    "auc",
    "benchmark",
    "binarize",
    "class_stats",
    "confusion",
    "drsnn",
    "fit_ohit",
    "knn_classify",
    "load_series",
    "metrics",
    "ohit",
    "random_oversample",
    "resample_dataset",
    "sample_gaussian",
    "shrink_covariance",
    "shrinkage_intensity",
    "smote",
    "synthesize",
    "wilcoxon_signed_rank",
    "write_series",
]
