import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

import oracles
from ohit.drsnn import (
    default_params,
    density_ratio,
    drsnn,
    extract_clusters,
    knn_lists,
    snn_density,
    snn_graph,
    write_labeling,
)
from ohit.errors import ContractViolation, ParameterClampWarning
from ohit.simulate import gaussian_blobs


def _graph(X, k):
    nt = knn_lists(X, k)
    return nt, snn_graph(nt)


def test_knn_collinear():
    nt = knn_lists(np.array([[0.0], [1.0], [3.0]]), 1)
    assert nt.neighbors.tolist() == [[1], [0], [1]]
    np.testing.assert_allclose(nt.distances.ravel(), [1, 1, 2])


def test_knn_clamps_k():
    with pytest.warns(ParameterClampWarning):
        nt = knn_lists(np.arange(8.0).reshape(4, 2), 5)
    assert nt.k == 3 and nt.clamped
    assert nt.neighbors.shape == (4, 3)


def test_knn_ties_prefer_lower_index():
    # points 0 and 2 are equidistant from 1
    nt = knn_lists(np.array([[0.0], [1.0], [2.0]]), 1)
    assert nt.neighbors[1].tolist() == [0]


def test_knn_two_blobs_match_brute_force():
    X, y = gaussian_blobs((20, 20), d=10, seed=3)
    nt = knn_lists(X, 8)
    assert nt.neighbors.tolist() == oracles.knn_brute(X.tolist(), 8)
    for i, row in enumerate(nt.neighbors):
        assert np.all(y[row] == y[i])
        assert i not in row and len(set(row)) == 8
    assert np.all(np.diff(nt.distances, axis=1) >= 0)


def test_snn_clique_weights():
    k = 4
    X = np.random.default_rng(0).normal(size=(k + 1, 3))
    nt, g = _graph(X, k)
    # every list is "all the others": a mutual pair shares the remaining k-1 points
    assert set(g.edges.values()) == {k - 1}
    dens = snn_density(g, nt)
    np.testing.assert_array_equal(dens, k * (k - 1))
    assert np.all(dens <= k * k)
    np.testing.assert_array_equal(density_ratio(dens, g, nt, k), 1.0)


def test_snn_requires_mutual_membership():
    # 2 is in 3's list but not vice versa
    X = np.array([[0.0], [0.1], [1.0], [5.0]])
    nt, g = _graph(X, 1)
    assert 2 in nt.neighbors[3] and 3 not in nt.neighbors[2]
    assert not g.adjacency[2, 3] and g.weight(2, 3) == 0


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 50), k=st.integers(1, 10), seed=st.integers(0, 2**32 - 1))
def test_snn_matches_pairwise_oracle(n, k, seed):
    k = min(k, n - 1)
    X = np.random.default_rng(seed).normal(size=(n, 4))
    nt, g = _graph(X, k)
    lists = oracles.knn_brute(X.tolist(), k)
    expected = oracles.snn_brute(lists)
    assert g.edges == expected
    assert np.array_equal(g.weights, g.weights.T)
    assert g.weights.min() >= 0 and g.weights.max() <= k
    np.testing.assert_array_equal(snn_density(g, nt), oracles.density_brute(lists, expected))


def test_isolated_point_has_zero_density_and_ratio():
    X = np.vstack([np.random.default_rng(1).normal(size=(10, 2)), [[100.0, 100.0]]])
    nt, g = _graph(X, 3)
    dens = snn_density(g, nt)
    assert dens[-1] == 0
    assert density_ratio(dens, g, nt, 3)[-1] == 0


def test_ratio_zero_denominator_sentinel():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    nt, g = _graph(X, 1)  # mutual pairs with no shared neighbors: all weights 0
    dens = snn_density(g, nt)
    assert np.all(dens == 0)
    np.testing.assert_array_equal(density_ratio(dens, g, nt, 1), 0.0)
    # positive density over a zero reference is reported as +inf
    fake = np.array([3.0, 0.0, 0.0, 0.0])
    assert density_ratio(fake, g, nt, 1)[0] == math.inf


def test_kappa_above_k_rejected():
    nt, g = _graph(np.random.default_rng(0).normal(size=(6, 2)), 2)
    with pytest.raises(ContractViolation):
        density_ratio(snn_density(g, nt), g, nt, 3)


def _ratio_oracle(X, k, kappa):
    lists = oracles.knn_brute(X.tolist(), k)
    edges = oracles.snn_brute(lists)
    dens = oracles.density_brute(lists, edges)
    out = []
    for p, nbrs in enumerate(lists):
        w = [edges.get((min(p, q), max(p, q)), 0) for q in nbrs]
        strongest = [q for _, _, q in sorted((-wq, pos, q) for pos, (wq, q) in enumerate(zip(w, nbrs)))[:kappa]]
        ref = sum(dens[q] for q in strongest) / kappa
        out.append(dens[p] / ref if ref > 0 else (math.inf if dens[p] > 0 else 0.0))
    return np.array(out)


def test_density_ratio_dense_sparse_bridge():
    rng = np.random.default_rng(0)
    axis = np.r_[20.0, np.zeros(4)]
    dense = rng.normal(scale=0.3, size=(20, 5))
    sparse = rng.normal(scale=2.0, size=(20, 5)) + axis
    bridge = np.outer([0.35, 0.5, 0.65], axis) + rng.normal(scale=0.3, size=(3, 5))
    X = np.vstack([dense, sparse, bridge])
    nt, g = _graph(X, 6)
    dr = density_ratio(snn_density(g, nt), g, nt, 6)
    np.testing.assert_allclose(dr, _ratio_oracle(X, 6, 6), rtol=0, atol=1e-12)
    # the ratio is insensitive to the absolute density of a blob
    assert 0.8 <= np.median(dr[:20]) <= 1.2
    assert 0.8 <= np.median(dr[20:40]) <= 1.2
    assert np.all(dr[40:] < 0.8)


def test_extract_single_component():
    X = np.random.default_rng(2).normal(size=(8, 3))
    nt, g = _graph(X, 7)
    dr = density_ratio(snn_density(g, nt), g, nt, 7)
    lab = extract_clusters(g, dr, 0.5, X=X, nt=nt)
    assert lab.m == 1 and lab.sizes() == [8]


def test_extract_infinite_threshold_falls_back_to_one_cluster():
    X, _ = gaussian_blobs((10, 10), d=5, seed=0)
    nt, g = _graph(X, 5)
    dr = density_ratio(snn_density(g, nt), g, nt, 5)
    lab = extract_clusters(g, dr, math.inf, X=X, nt=nt)
    assert lab.m == 1 and not lab.core_flags.any()
    assert np.all(lab.assignment == 1)


def test_extract_rejects_nonpositive_threshold():
    nt, g = _graph(np.random.default_rng(0).normal(size=(5, 2)), 2)
    with pytest.raises(ContractViolation):
        extract_clusters(g, np.ones(5), 0.0)


def test_two_blobs_explicit_params():
    X, y = gaussian_blobs((20, 20), d=50, seed=11)
    lab = drsnn(X, k=8, kappa=5, drT=0.8)
    assert lab.m == 2
    assert adjusted_rand_score(y, lab.assignment) == 1.0


def test_three_blobs_sizes_recovered():
    X, y = gaussian_blobs((10, 20, 40), d=50, seed=5)
    lab = drsnn(X)
    assert lab.m == 3
    assert sorted(lab.sizes()) == [10, 20, 40]
    assert adjusted_rand_score(y, lab.assignment) == 1.0


def test_singleton_and_tiny_sets():
    assert drsnn(np.ones((1, 4))).m == 1
    with pytest.warns(ParameterClampWarning):
        lab = drsnn(np.random.default_rng(0).normal(size=(3, 4)), k=5)
    assert lab.m == 1 and lab.sizes() == [3]


def test_default_params():
    assert default_params(100) == (15, 15, 0.9)
    assert default_params(4) == (3, 3, 0.9)
    assert default_params(10)[0] == 5


def test_labeling_invariants():
    X, _ = gaussian_blobs((12, 25, 7), d=20, seed=9)
    lab = drsnn(X)
    assert sum(lab.sizes()) == len(X)
    assert sorted(set(lab.assignment.tolist())) == list(range(1, lab.m + 1))
    assert min(lab.sizes()) >= 4 or lab.m == 1


def test_deterministic():
    X, _ = gaussian_blobs((20, 30), d=30, seed=4)
    a, b = drsnn(X), drsnn(X.copy())
    np.testing.assert_array_equal(a.assignment, b.assignment)


@pytest.mark.parametrize("seed", range(5))
def test_permutation_consistency(seed):
    X, _ = gaussian_blobs((20, 30, 25), d=50, seed=seed)
    perm = np.random.default_rng(seed + 100).permutation(len(X))
    a = drsnn(X)
    b = drsnn(X[perm])
    assert adjusted_rand_score(a.assignment[perm], b.assignment) == 1.0


@pytest.mark.parametrize("c", [0.001, 3.7, 1e4])
def test_scale_invariance(c):
    X, _ = gaussian_blobs((20, 30), d=50, seed=2)
    nt1, g1 = _graph(X, 8)
    nt2, g2 = _graph(c * X, 8)
    np.testing.assert_array_equal(nt1.neighbors, nt2.neighbors)
    np.testing.assert_array_equal(g1.weights, g2.weights)
    np.testing.assert_array_equal(drsnn(X).assignment, drsnn(c * X).assignment)


def test_labeling_dump(tmp_path):
    X, _ = gaussian_blobs((10, 10), d=5, seed=0)
    lab = drsnn(X)
    p = tmp_path / "labels.csv"
    write_labeling(p, lab)
    lines = p.read_text().splitlines()
    assert lines[0] == "point_index,cluster_id,is_core,density_ratio"
    assert len(lines) == 21
    idx, cid, core, ratio = lines[5].split(",")
    assert int(idx) == 4 and int(cid) == lab.assignment[4]
    assert float(ratio) == lab.density_ratios[4]
