"""Reference oversamplers: no resampling, random oversampling and SMOTE.

All of them return a :class:`~ohit.synthesis.SyntheticSet` whose
``provenance`` holds the index of the minority row each sample came from.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .drsnn import knn_lists
from .errors import ContractViolation, ParameterClampWarning
from .synthesis import SyntheticSet


def no_oversample(P: np.ndarray) -> SyntheticSet:
    return SyntheticSet.empty(np.asarray(P).shape[1])


def random_oversample(P: np.ndarray, eta: int, seed: int = 0) -> SyntheticSet:
    """Draw ``eta`` rows of ``P`` uniformly with replacement."""
    P = np.asarray(P, dtype=float)
    if P.shape[0] < 1:
        raise ContractViolation("empty minority set")
    if eta < 0:
        raise ContractViolation(f"eta must be >= 0, got {eta}")
    idx = np.random.default_rng(seed).integers(0, P.shape[0], size=int(eta))
    return SyntheticSet(P[idx].copy(), idx.astype(np.int64))


@dataclass(frozen=True)
class SmoteRecord:
    """The random draws behind each SMOTE sample, in output order."""

    base: np.ndarray
    neighbor: np.ndarray
    gap: np.ndarray


def smote(
    P: np.ndarray,
    eta: int,
    k_smote: int = 5,
    seed: int = 0,
    return_record: bool = False,
):
    """SMOTE interpolation ``x + u * (x_nn - x)`` with ``u ~ U[0, 1)``.

    Base samples cycle through ``P`` in row order; ``x_nn`` is drawn uniformly
    from the ``k_smote`` nearest minority neighbors of the base. With a single
    minority sample this falls back to :func:`random_oversample`.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    eta = int(eta)
    if eta < 0:
        raise ContractViolation(f"eta must be >= 0, got {eta}")
    if n == 1:
        warnings.warn("SMOTE needs two minority samples; using random oversampling", ParameterClampWarning, stacklevel=2)
        syn = random_oversample(P, eta, seed)
        rec = SmoteRecord(syn.provenance, syn.provenance, np.zeros(eta))
        return (syn, rec) if return_record else syn
    if k_smote >= n:
        warnings.warn(f"k_smote={k_smote} >= n_min={n}; clamped to {n - 1}", ParameterClampWarning, stacklevel=2)
        k_smote = n - 1
    rng = np.random.default_rng(seed)
    base = np.arange(eta, dtype=np.int64) % n
    if eta == 0:
        syn = SyntheticSet.empty(P.shape[1])
        rec = SmoteRecord(base, base, np.zeros(0))
        return (syn, rec) if return_record else syn
    nn = knn_lists(P, k_smote).neighbors
    neighbor = nn[base, rng.integers(0, k_smote, size=eta)]
    gap = rng.random(eta)
    X = P[base]
    samples = X + gap[:, None] * (P[neighbor] - X)
    syn = SyntheticSet(samples, base)
    return (syn, SmoteRecord(base, neighbor, gap)) if return_record else syn
