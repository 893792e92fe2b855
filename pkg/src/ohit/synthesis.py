"""Allocation of synthetic counts over clusters and Gaussian sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, NumericalDegeneracyError
from .shrinkage import ShrinkageEstimate


@dataclass(frozen=True)
class SynthesisPlan:
    per_cluster: tuple[tuple[int, int], ...]  # (cluster_id, count)
    eta_total: int
    seed: int = 0

    @property
    def total(self) -> int:
        return sum(c for _, c in self.per_cluster)


@dataclass(frozen=True)
class SyntheticSet:
    samples: np.ndarray
    provenance: np.ndarray  # cluster id (or source row for the baselines) per sample

    def __len__(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def empty(cls, d: int) -> "SyntheticSet":
        return cls(np.empty((0, d)), np.empty(0, dtype=np.int64))


def allocate(eta: int, cluster_sizes: Sequence[int], n_min: int, seed: int = 0) -> SynthesisPlan:
    """``ceil(eta * |C_i| / n_min)`` synthetic samples for cluster ``i`` (ids 1..m).

    The ceiling overshoot is kept: the total lies in ``[eta, eta + m]``.
    """
    eta = int(eta)
    if eta < 0:
        raise ContractViolation(f"eta must be >= 0, got {eta}")
    sizes = [int(s) for s in cluster_sizes]
    if any(s < 1 for s in sizes):
        raise ContractViolation("cluster sizes must be >= 1")
    if sum(sizes) != n_min:
        raise ContractViolation(f"cluster sizes sum to {sum(sizes)}, expected n_min={n_min}")
    # integer ceiling division avoids float rounding in eta * size / n_min
    counts = tuple((cid, -(-eta * s // n_min)) for cid, s in enumerate(sizes, start=1))
    return SynthesisPlan(counts, eta, seed)


def sample_gaussian(mu, cov, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` rows ``mu + L z`` with ``L L^T = cov`` and ``z ~ N(0, I)``.

    ``cov`` must already pass :func:`ohit.shrinkage.ensure_positive_definite`.
    """
    mu = np.asarray(mu, dtype=float)
    d = mu.shape[0]
    if count < 0:
        raise ContractViolation(f"count must be >= 0, got {count}")
    if count == 0:
        return np.empty((0, d))
    try:
        L = np.linalg.cholesky(np.asarray(cov, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalDegeneracyError(f"Cholesky factorization failed: {exc}") from None
    z = np.random.default_rng(seed).standard_normal((count, d))
    return mu + z @ L.T


def cluster_seed(seed: int, cluster_id: int) -> int:
    return (int(seed) ^ int(cluster_id)) & 0xFFFFFFFFFFFFFFFF


def synthesize(plan: SynthesisPlan, estimates: Mapping[int, ShrinkageEstimate]) -> SyntheticSet:
    """Concatenate per-cluster draws in plan order.

    Each cluster is sampled from its own stream seeded with ``seed ^ cluster_id``,
    so the output of a cluster does not depend on the order clusters are visited.
    """
    ids = [cid for cid, _ in plan.per_cluster]
    if set(ids) != set(estimates):
        raise ContractViolation(f"plan clusters {sorted(ids)} != estimate clusters {sorted(estimates)}")
    d = next(iter(estimates.values())).d if estimates else 0
    blocks, prov = [], []
    for cid, count in plan.per_cluster:
        est = estimates[cid]
        blocks.append(sample_gaussian(est.mu, est.S_pd, count, cluster_seed(plan.seed, cid)))
        prov.append(np.full(count, cid, dtype=np.int64))
    if not blocks:
        return SyntheticSet.empty(d)
    return SyntheticSet(np.vstack(blocks), np.concatenate(prov))

