"""Weighted graph representation, edge weighting schemes and the normalized Laplacian.

A connectivity graph is a symmetric nonnegative weight matrix with a zero
diagonal, optionally paired with 3-D node coordinates (millimeters). Three
weighting schemes are supported: the raw weights, inverse edge length on the
binarized support, and weight divided by edge length. All transforms preserve
symmetry and the zero diagonal exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WEIGHTINGS = ("original", "distance", "combined")


@dataclass
class ConnectivityGraph:
    """Symmetric nonnegative weighted adjacency matrix with optional metadata.

    Invariants are enforced at construction: the weight matrix must be
    square, finite, elementwise nonnegative, exactly symmetric and have a
    zero diagonal. Coordinates, when present, are an (n, 3) array in node
    order.
    """

    weights: np.ndarray
    coordinates: np.ndarray | None = None
    subject_id: str | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weight matrix contains non-finite entries")
        if np.any(w < 0):
            raise ValueError("weight matrix contains negative entries")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix is not symmetric (symmetrize before constructing)")
        if np.any(np.diagonal(w) != 0):
            raise ValueError("weight matrix has nonzero diagonal entries (self-loops)")
        self.weights = w
        if self.coordinates is not None:
            c = np.asarray(self.coordinates, dtype=float)
            if c.ndim != 2 or c.shape[1] != 3:
                raise ValueError(f"coordinates must be an (n, 3) array, got shape {c.shape}")
            if c.shape[0] != w.shape[0]:
                raise ValueError(
                    f"coordinate count {c.shape[0]} does not match node count {w.shape[0]}"
                )
            self.coordinates = c

    @property
    def n(self) -> int:
        """Node count."""
        return self.weights.shape[0]

    def edge_count(self) -> int:
        """Number of edges with strictly positive weight."""
        iu = np.triu_indices(self.n, k=1)
        return int(np.count_nonzero(self.weights[iu]))


def degrees(g: ConnectivityGraph) -> np.ndarray:
    """Weighted node degrees d_i = sum_j a_ij."""
    return g.weights.sum(axis=1)


def pairwise_node_distances(coordinates: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix between node coordinates (exactly symmetric)."""
    c = np.asarray(coordinates, dtype=float)
    diff = c[:, None, :] - c[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def weight_original(g: ConnectivityGraph) -> ConnectivityGraph:
    """Identity weighting: keep the raw weights."""
    return ConnectivityGraph(g.weights.copy(), g.coordinates, g.subject_id)


def _resolve_coordinates(g: ConnectivityGraph, coordinates) -> np.ndarray:
    if coordinates is None:
        coordinates = g.coordinates
    if coordinates is None:
        raise ValueError("node coordinates are required for length-based weighting")
    c = np.asarray(coordinates, dtype=float)
    if c.shape != (g.n, 3):
        raise ValueError(f"expected coordinates of shape ({g.n}, 3), got {c.shape}")
    return c


def _edge_lengths(g: ConnectivityGraph, coordinates) -> tuple[np.ndarray, np.ndarray]:
    """Support mask and length matrix, validating that existing edges have positive length."""
    c = _resolve_coordinates(g, coordinates)
    lengths = pairwise_node_distances(c)
    support = g.weights > 0
    bad = support & (lengths <= 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"nodes {i} and {j} share coordinates but are connected (zero edge length)"
        )
    return support, lengths


def weight_distance(g: ConnectivityGraph, coordinates=None) -> ConnectivityGraph:
    """Binarize the support and weight each existing edge by its inverse length."""
    support, lengths = _edge_lengths(g, coordinates)
    out = np.zeros_like(g.weights)
    out[support] = 1.0 / lengths[support]
    return ConnectivityGraph(out, g.coordinates, g.subject_id)


def weight_combined(g: ConnectivityGraph, coordinates=None) -> ConnectivityGraph:
    """Divide each edge weight by the physical length of the edge."""
    support, lengths = _edge_lengths(g, coordinates)
    out = np.zeros_like(g.weights)
    out[support] = g.weights[support] / lengths[support]
    return ConnectivityGraph(out, g.coordinates, g.subject_id)


def apply_weighting(g: ConnectivityGraph, scheme: str, coordinates=None) -> ConnectivityGraph:
    """Dispatch one of the named weighting schemes."""
    if scheme == "original":
        return weight_original(g)
    if scheme == "distance":
        return weight_distance(g, coordinates)
    if scheme == "combined":
        return weight_combined(g, coordinates)
    raise ValueError(f"unknown weighting scheme {scheme!r}; expected one of {WEIGHTINGS}")


def scale_by_total_weight(g: ConnectivityGraph) -> ConnectivityGraph:
    """Divide the matrix by the sum of all its entries (both triangles).

    The result sums to one. Spectra of the normalized Laplacian are unchanged
    by this scaling; it only affects edge-vector features.
    """
    total = g.weights.sum()
    if total <= 0:
        raise ValueError("cannot scale an all-zero weight matrix")
    return ConnectivityGraph(g.weights / total, g.coordinates, g.subject_id)


def normalized_laplacian(g: ConnectivityGraph) -> np.ndarray:
    """Symmetrically normalized Laplacian D^{-1/2} (D - A) D^{-1/2}.

    Isolated nodes (zero degree) get an all-zero row and column, contributing
    eigenvalue 0 each. The result is exactly symmetric with unit diagonal on
    non-isolated nodes and off-diagonal entries in [-1, 0].
    """
    d = degrees(g)
    denom = np.sqrt(np.outer(d, d))
    lap = np.zeros_like(g.weights)
    np.divide(g.weights, denom, out=lap, where=denom > 0)
    np.negative(lap, out=lap)
    np.fill_diagonal(lap, np.where(d > 0, 1.0, 0.0))
    return lap


def group_average(graphs: list[ConnectivityGraph]) -> ConnectivityGraph:
    """Entrywise arithmetic mean of the weight matrices."""
    if not graphs:
        raise ValueError("cannot average an empty list of graphs")
    n = graphs[0].n
    for g in graphs:
        if g.n != n:
            raise ValueError(f"node count mismatch: expected {n}, got {g.n}")
    mean = np.mean([g.weights for g in graphs], axis=0)
    return ConnectivityGraph(mean, graphs[0].coordinates)
