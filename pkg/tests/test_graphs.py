import numpy as np
import pytest

from spectremd import (
    ConnectivityGraph,
    degrees,
    group_average,
    normalized_laplacian,
    scale_by_total_weight,
    spectrum_of,
    weight_combined,
    weight_distance,
    weight_original,
)
from spectremd.graphs import apply_weighting, pairwise_node_distances

from conftest import random_connectome


def graph2(w):
    return ConnectivityGraph(np.array([[0.0, w], [w, 0.0]]))


def test_graph_invariants_enforced():
    with pytest.raises(ValueError, match="square"):
        ConnectivityGraph(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="negative"):
        ConnectivityGraph(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError, match="symmetric"):
        ConnectivityGraph(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError, match="diagonal"):
        ConnectivityGraph(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(ValueError, match="non-finite"):
        ConnectivityGraph(np.array([[0.0, np.inf], [np.inf, 0.0]]))


def test_weight_original_is_identity(rng):
    g = random_connectome(rng, 8)
    assert np.array_equal(weight_original(g).weights, g.weights)
    zero = ConnectivityGraph(np.zeros((3, 3)))
    assert np.array_equal(weight_original(zero).weights, np.zeros((3, 3)))
    assert weight_original(graph2(6.0)).weights[0, 1] == 6.0


def test_weight_distance_basic():
    coords = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    g = ConnectivityGraph(np.array([[0.0, 5.0], [5.0, 0.0]]), coords)
    assert weight_distance(g).weights[0, 1] == 0.5


def test_weight_distance_absent_edge_stays_absent():
    coords = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    g = ConnectivityGraph(np.zeros((2, 2)), coords)
    assert np.array_equal(weight_distance(g).weights, np.zeros((2, 2)))


def test_weight_distance_euclidean():
    coords = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
    g = ConnectivityGraph(np.array([[0.0, 9.0], [9.0, 0.0]]), coords)
    assert weight_distance(g).weights[0, 1] == pytest.approx(0.2)


def test_weight_distance_depends_only_on_support(rng):
    coords = rng.uniform(-40, 40, size=(10, 3))
    g = random_connectome(rng, 10)
    doubled = ConnectivityGraph(2.0 * g.weights)
    a = weight_distance(g, coords).weights
    b = weight_distance(doubled, coords).weights
    assert np.array_equal(a, b)


def test_weight_distance_coincident_coordinates_error():
    coords = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
    g = ConnectivityGraph(np.array([[0.0, 1.0], [1.0, 0.0]]), coords)
    with pytest.raises(ValueError, match="zero edge length"):
        weight_distance(g)


def test_weight_distance_requires_coordinates():
    g = graph2(1.0)
    with pytest.raises(ValueError, match="coordinates"):
        weight_distance(g)


def test_weight_combined_basic():
    coords = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    g = ConnectivityGraph(np.array([[0.0, 6.0], [6.0, 0.0]]), coords)
    assert weight_combined(g).weights[0, 1] == 3.0


def test_weight_combined_unit_ratio():
    coords = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 7.0]])
    g = ConnectivityGraph(np.array([[0.0, 7.0], [7.0, 0.0]]), coords)
    assert weight_combined(g).weights[0, 1] == 1.0


def test_weight_combined_zero_edge(rng):
    coords = rng.uniform(-10, 10, size=(3, 3))
    g = ConnectivityGraph(np.zeros((3, 3)), coords)
    assert np.array_equal(weight_combined(g).weights, np.zeros((3, 3)))


def test_weighting_transforms_preserve_symmetry_and_diagonal(rng):
    coords = rng.uniform(-40, 40, size=(12, 3))
    g = random_connectome(rng, 12)
    for scheme in ("original", "distance", "combined"):
        out = apply_weighting(g, scheme, coords)
        assert np.array_equal(out.weights, out.weights.T)
        assert np.all(np.diagonal(out.weights) == 0)


def test_scale_by_total_weight():
    g = graph2(4.0)
    scaled = scale_by_total_weight(g)
    assert scaled.weights[0, 1] == 0.5  # 4 / (4 + 4), both ordered pairs counted
    assert scaled.weights.sum() == pytest.approx(1.0)


def test_scale_idempotent(rng):
    g = random_connectome(rng, 9)
    once = scale_by_total_weight(g)
    twice = scale_by_total_weight(once)
    assert np.allclose(once.weights, twice.weights, rtol=0, atol=1e-15)


def test_scale_zero_matrix_error():
    with pytest.raises(ValueError, match="all-zero"):
        scale_by_total_weight(ConnectivityGraph(np.zeros((4, 4))))


def test_laplacian_single_edge_independent_of_weight():
    expected = np.array([[1.0, -1.0], [-1.0, 1.0]])
    for w in (1.0, 3.0, 0.25, 1e6):
        assert np.allclose(normalized_laplacian(graph2(w)), expected, atol=1e-12)


def test_laplacian_path_eigenvalues():
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 1.0
    w[1, 2] = w[2, 1] = 1.0
    s = spectrum_of(ConnectivityGraph(w))
    assert np.allclose(s.values, [0.0, 1.0, 2.0], atol=1e-8)


def test_laplacian_isolated_node_zero_row():
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 2.0
    lap = normalized_laplacian(ConnectivityGraph(w))
    assert np.all(lap[2] == 0)
    assert np.all(lap[:, 2] == 0)
    assert lap[2, 2] == 0.0


def test_laplacian_diagonal_and_offdiagonal_ranges(rng):
    g = random_connectome(rng, 20, density=0.4)
    lap = normalized_laplacian(g)
    d = degrees(g)
    assert np.array_equal(lap, lap.T)
    assert np.allclose(np.diagonal(lap), (d > 0).astype(float))
    off = lap[~np.eye(20, dtype=bool)]
    assert np.all(off <= 0)
    assert np.all(off >= -1 - 1e-12)


def test_laplacian_scale_invariance(rng):
    for _ in range(5):
        g = random_connectome(rng, 15)
        for c in (0.5, 3.0, 1e4):
            scaled = ConnectivityGraph(c * g.weights)
            assert np.allclose(
                normalized_laplacian(g), normalized_laplacian(scaled), rtol=0, atol=1e-12
            )


def test_laplacian_trace_equals_n_without_isolated_nodes(rng):
    g = random_connectome(rng, 25, density=0.8)
    assert degrees(g).min() > 0
    assert abs(np.trace(normalized_laplacian(g)) - 25) < 1e-9


def test_pairwise_node_distances_symmetric(rng):
    coords = rng.uniform(-50, 50, size=(20, 3))
    lengths = pairwise_node_distances(coords)
    assert np.array_equal(lengths, lengths.T)
    assert np.all(np.diagonal(lengths) == 0)


def test_group_average():
    a = graph2(0.0)
    b = graph2(4.0)
    assert group_average([a, b]).weights[0, 1] == 2.0
    g = graph2(3.0)
    assert np.array_equal(group_average([g, g]).weights, g.weights)


def test_group_average_errors(rng):
    with pytest.raises(ValueError, match="empty"):
        group_average([])
    with pytest.raises(ValueError, match="mismatch"):
        group_average([random_connectome(rng, 4), random_connectome(rng, 5)])
