"""End-to-end OHIT: cluster the minority class, estimate, synthesize.

Four modes are supported:

``full``
    DRSNN clustering, shrinkage covariance per cluster, Gaussian synthesis.
``no_drsnn``
    the whole minority class is treated as one cluster.
``no_shrinkage``
    the raw sample covariance is used (intensity forced to 0).
``er``
    eigenvalue regularization replaces shrinkage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datasets import BinaryDataset
from .drsnn import MIN_CLUSTER_SIZE, ClusterLabeling, drsnn
from .errors import ContractViolation
from .shrinkage import ShrinkageEstimate, ensure_positive_definite, estimate, estimate_er
from .synthesis import SynthesisPlan, SyntheticSet, allocate, synthesize

MODES = ("full", "no_drsnn", "no_shrinkage", "er")
BALANCE = "balance"


@dataclass(frozen=True)
class OhitConfig:
    k: int | None = None
    kappa: int | None = None
    drT: float | None = None
    eta: int | str = BALANCE
    seed: int = 0
    mode: str = "full"
    min_cluster_size: int = MIN_CLUSTER_SIZE

    def __post_init__(self):
        if self.mode not in MODES:
            raise ContractViolation(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if isinstance(self.eta, str):
            if self.eta != BALANCE:
                raise ContractViolation(f"eta must be a count or {BALANCE!r}, got {self.eta!r}")
        elif int(self.eta) < 0:
            raise ContractViolation(f"eta must be >= 0, got {self.eta}")
        if self.k is not None and self.k < 1:
            raise ContractViolation(f"k must be >= 1, got {self.k}")
        if self.kappa is not None and (self.kappa < 1 or (self.k is not None and self.kappa > self.k)):
            raise ContractViolation(f"kappa must lie in [1, k], got {self.kappa}")
        if self.drT is not None and not self.drT > 0:
            raise ContractViolation(f"drT must be > 0, got {self.drT}")
        if self.seed < 0:
            raise ContractViolation("seed must be non-negative")


@dataclass(frozen=True)
class OhitResult:
    synthetic: SyntheticSet
    labeling: ClusterLabeling
    estimates: dict[int, ShrinkageEstimate] = field(repr=False)
    plan: SynthesisPlan

    @property
    def lambdas(self) -> list[float]:
        return [self.estimates[c].lam for c in sorted(self.estimates)]


def resolve_eta(eta: int | str, n_min: int, n_maj: int) -> int:
    if eta == BALANCE:
        return max(n_maj - n_min, 0)
    return int(eta)


def _single_cluster(n: int) -> ClusterLabeling:
    return ClusterLabeling(np.ones(n, dtype=np.int64), 1, np.zeros(n, dtype=bool), np.full(n, np.nan))


def _singleton_estimate(x: np.ndarray) -> ShrinkageEstimate:
    # a lone sample has no spread: duplicate it under a ridge-sized covariance
    d = x.shape[0]
    zero = np.zeros((d, d))
    return ShrinkageEstimate(x.copy(), zero, float("nan"), zero, 1, ensure_positive_definite(zero))


def _estimate(C: np.ndarray, mode: str) -> ShrinkageEstimate:
    if C.shape[0] == 1:
        return _singleton_estimate(C[0])
    if mode == "er":
        return estimate_er(C)
    if mode == "no_shrinkage":
        return estimate(C, lam=0.0)
    return estimate(C)


def fit_ohit(P: np.ndarray, eta: int, cfg: OhitConfig) -> OhitResult:
    """Run OHIT on the minority matrix ``P`` and generate ``eta`` (plus ceiling overshoot) samples."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if n < 1:
        raise ContractViolation("empty minority set")
    if cfg.mode == "no_drsnn" or n == 1:
        labeling = _single_cluster(n)
    else:
        labeling = drsnn(P, cfg.k, cfg.kappa, cfg.drT, min_cluster_size=cfg.min_cluster_size)
    estimates = {c: _estimate(P[labeling.members(c)], cfg.mode) for c in range(1, labeling.m + 1)}
    plan = allocate(eta, labeling.sizes(), n, seed=cfg.seed)
    return OhitResult(synthesize(plan, estimates), labeling, estimates, plan)


def ohit(data: BinaryDataset, cfg: OhitConfig = OhitConfig()) -> SyntheticSet:
    eta = resolve_eta(cfg.eta, data.n_min, data.n_maj)
    return fit_ohit(data.minority, eta, cfg).synthetic


def resample_dataset(data: BinaryDataset, cfg: OhitConfig = OhitConfig()) -> BinaryDataset:
    """Append OHIT samples to the minority side; the majority side is untouched."""
    syn = ohit(data, cfg)
    if len(syn) == 0:
        return data
    return data.with_minority(np.vstack([data.minority, syn.samples]))
