"""Density-ratio based shared-nearest-neighbor (DRSNN) clustering.

The minority class is clustered in four steps:

1. exact Euclidean k-nearest-neighbor lists,
2. a Jarvis-Patrick style SNN graph: mutual k-NN pairs weighted by the
   number of neighbors they share,
3. an SNN density per point (sum of its SNN weights) and the ratio of that
   density to the mean density of its ``kappa`` strongest neighbors,
4. core points (ratio >= ``drT``) linked by SNN edges form clusters; every
   other point is attached to a core point, then clusters that are too small
   to carry a covariance estimate are merged into their nearest neighbor.

Every minority sample ends up in exactly one cluster. No randomness is
involved and all ties are broken by the lower point index.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from .errors import ContractViolation, InsufficientDataError, ParameterClampWarning

MIN_CLUSTER_SIZE = 4
DEFAULT_DRT = 0.9


@dataclass(frozen=True)
class NeighborTable:
    k: int
    neighbors: np.ndarray  # (n, k) int, nearest first
    distances: np.ndarray  # (n, k) Euclidean, non-decreasing per row
    clamped: bool = False

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]


@dataclass(frozen=True)
class SnnGraph:
    """Symmetric SNN graph stored densely (minority sets are small).

    ``adjacency[i, j]`` is True iff i and j are in each other's k-NN list;
    ``weights[i, j]`` is then the number of neighbors the two lists share
    (0 for absent edges).
    """

    adjacency: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def weight(self, i: int, j: int) -> int:
        return int(self.weights[i, j])

    @property
    def edges(self) -> dict[tuple[int, int], int]:
        ii, jj = np.nonzero(np.triu(self.adjacency, 1))
        return {(int(i), int(j)): int(self.weights[i, j]) for i, j in zip(ii, jj)}


@dataclass(frozen=True)
class ClusterLabeling:
    assignment: np.ndarray  # cluster id per point, ids 1..m
    m: int
    core_flags: np.ndarray
    density_ratios: np.ndarray

    def sizes(self) -> list[int]:
        return [int(np.sum(self.assignment == c)) for c in range(1, self.m + 1)]

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster_id)


def squared_distances(A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    # direct differences rather than the Gram-matrix shortcut: rank order must
    # survive rescaling of the inputs
    A = np.asarray(A, dtype=float)
    return cdist(A, A if B is None else np.asarray(B, dtype=float), "sqeuclidean")


def knn_lists(X: np.ndarray, k: int) -> NeighborTable:
    """Exact k-NN lists under Euclidean distance, self excluded.

    ``k >= n`` is clamped to ``n - 1`` with a :class:`ParameterClampWarning`.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise InsufficientDataError(f"k-NN needs at least 2 points, got {n}")
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    clamped = False
    if k >= n:
        warnings.warn(f"k={k} >= n={n}; clamped to {n - 1}", ParameterClampWarning, stacklevel=2)
        k, clamped = n - 1, True
    D = squared_distances(X)
    np.fill_diagonal(D, np.inf)
    # stable sort keeps lower indices first among equal distances
    order = np.argsort(D, axis=1, kind="stable")[:, :k]
    dist = np.sqrt(np.take_along_axis(D, order, axis=1))
    return NeighborTable(k, order, dist, clamped)


def _membership(nt: NeighborTable) -> np.ndarray:
    M = np.zeros((nt.n, nt.n), dtype=bool)
    M[np.repeat(np.arange(nt.n), nt.k), nt.neighbors.ravel()] = True
    return M


def snn_graph(nt: NeighborTable) -> SnnGraph:
    M = _membership(nt)
    mutual = M & M.T
    Mf = M.astype(float)
    shared = np.rint(Mf @ Mf.T).astype(np.int64)
    weights = np.where(mutual, shared, 0)
    return SnnGraph(mutual, weights)


def snn_density(g: SnnGraph, nt: NeighborTable) -> np.ndarray:
    """Sum of SNN weights over each point's k-NN list (absent edges add 0)."""
    return np.take_along_axis(g.weights, nt.neighbors, axis=1).sum(axis=1).astype(float)


def _strongest_neighbors(g: SnnGraph, nt: NeighborTable, kappa: int) -> np.ndarray:
    w = np.take_along_axis(g.weights, nt.neighbors, axis=1)
    # descending weight; equal weights keep k-NN (distance) order
    rank = np.argsort(-w, axis=1, kind="stable")[:, :kappa]
    return np.take_along_axis(nt.neighbors, rank, axis=1)


def density_ratio(densities: np.ndarray, g: SnnGraph, nt: NeighborTable, kappa: int) -> np.ndarray:
    """Density of each point over the mean density of its ``kappa`` strongest neighbors.

    A zero denominator gives 0 when the point's own density is 0 and ``inf``
    otherwise (such points always count as core).
    """
    if not 1 <= kappa <= nt.k:
        raise ContractViolation(f"kappa must lie in [1, k={nt.k}], got {kappa}")
    densities = np.asarray(densities, dtype=float)
    ref = densities[_strongest_neighbors(g, nt, kappa)].mean(axis=1)
    out = np.zeros_like(densities)
    pos = ref > 0
    out[pos] = densities[pos] / ref[pos]
    out[~pos & (densities > 0)] = np.inf
    return out


def _relabel(assign: np.ndarray) -> np.ndarray:
    """Map arbitrary ids to 1..m ordered by each cluster's lowest member index."""
    _, first = np.unique(assign, return_index=True)
    old_ids = assign[np.sort(first)]
    mapping = {int(old): new for new, old in enumerate(old_ids, start=1)}
    return np.array([mapping[int(a)] for a in assign], dtype=np.int64)


def _merge_small(X: np.ndarray, assign: np.ndarray, min_size: int) -> np.ndarray:
    assign = assign.copy()
    while True:
        ids, counts = np.unique(assign, return_counts=True)
        if len(ids) <= 1 or counts.min() >= min_size:
            return assign
        small = ids[np.argmin(counts)]  # smallest; lowest id among equals
        others = ids[ids != small]
        centroids = np.array([X[assign == c].mean(axis=0) for c in others])
        here = X[assign == small].mean(axis=0, keepdims=True)
        target = others[int(np.argmin(squared_distances(here, centroids)[0]))]
        assign[assign == small] = target


def extract_clusters(
    g: SnnGraph,
    ratios: np.ndarray,
    drT: float,
    X: np.ndarray | None = None,
    nt: NeighborTable | None = None,
    min_cluster_size: int = MIN_CLUSTER_SIZE,
) -> ClusterLabeling:
    """Core-point connected components plus attachment of the remaining points.

    ``X`` is needed to attach points with no core SNN neighbor (nearest core
    point by Euclidean distance) and to merge clusters smaller than
    ``min_cluster_size``; without it those points fall back to the cluster of
    the lowest-indexed core point and no merging is done.
    """
    if not drT > 0:
        raise ContractViolation(f"drT must be > 0, got {drT}")
    ratios = np.asarray(ratios, dtype=float)
    n = g.n
    core = (ratios >= drT) if math.isfinite(drT) else np.zeros(n, dtype=bool)
    if not core.any():
        return ClusterLabeling(np.ones(n, dtype=np.int64), 1, core, ratios)

    core_idx = np.flatnonzero(core)
    sub = g.adjacency[np.ix_(core_idx, core_idx)]
    _, comp = connected_components(csr_matrix(sub), directed=False)
    assign = np.zeros(n, dtype=np.int64)
    assign[core_idx] = comp + 1

    if nt is not None:
        order = nt.neighbors
    else:
        order = np.argsort(-g.weights, axis=1, kind="stable")
    for p in np.flatnonzero(~core):
        cand = [q for q in order[p] if g.adjacency[p, q] and core[q]]
        if cand:
            w = [g.weights[p, q] for q in cand]
            assign[p] = assign[cand[int(np.argmax(w))]]
        elif X is not None:
            dist = squared_distances(X[p : p + 1], X[core_idx])[0]
            assign[p] = assign[core_idx[int(np.argmin(dist))]]
        else:
            assign[p] = assign[core_idx[0]]

    if X is not None and min_cluster_size > 1:
        assign = _merge_small(np.asarray(X, dtype=float), assign, min_cluster_size)
    assign = _relabel(assign)
    return ClusterLabeling(assign, int(assign.max()), core, ratios)


def default_params(n: int) -> tuple[int, int, float]:
    """Default (k, kappa, drT) for a minority set of size ``n``.

    ``k = ceil(1.5 * sqrt(n))`` clamped to ``[5, n - 1]``; a bare ``sqrt(n)``
    leaves too few mutual links in d >= 50 and splits compact modes.
    """
    k = max(5, math.ceil(1.5 * math.sqrt(n)))
    k = max(1, min(k, n - 1))
    return k, k, DEFAULT_DRT


def drsnn(
    P: np.ndarray,
    k: int | None = None,
    kappa: int | None = None,
    drT: float | None = None,
    min_cluster_size: int = MIN_CLUSTER_SIZE,
) -> ClusterLabeling:
    """Cluster the minority matrix ``P``; parameters left as None use :func:`default_params`."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if n < 1:
        raise InsufficientDataError("empty minority set")
    if n == 1:
        return ClusterLabeling(np.ones(1, dtype=np.int64), 1, np.zeros(1, dtype=bool), np.zeros(1))
    dk, _, ddr = default_params(n)
    k = dk if k is None else int(k)
    kappa = k if kappa is None else int(kappa)
    drT = ddr if drT is None else float(drT)
    if kappa > k:
        raise ContractViolation(f"kappa={kappa} exceeds k={k}")
    nt = knn_lists(P, k)
    kappa = min(kappa, nt.k)
    g = snn_graph(nt)
    dens = snn_density(g, nt)
    ratios = density_ratio(dens, g, nt, kappa)
    return extract_clusters(g, ratios, drT, X=P, nt=nt, min_cluster_size=min_cluster_size)


def write_labeling(path: str | os.PathLike, labeling: ClusterLabeling, delimiter: str = ",") -> None:
    """Debug dump: ``point_index, cluster_id, is_core, density_ratio`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(delimiter.join(["point_index", "cluster_id", "is_core", "density_ratio"]) + "\n")
        for i, (c, core, r) in enumerate(zip(labeling.assignment, labeling.core_flags, labeling.density_ratios)):
            fh.write(delimiter.join([str(i), str(int(c)), str(int(bool(core))), repr(float(r))]) + "\n")
