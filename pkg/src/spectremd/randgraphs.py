"""Random graph generators with exact edge-count matching.

Three classic models — uniform random (ER), preferential attachment (BA)
and rewired ring lattice (WS) — generated as simple unweighted graphs with
exactly the requested number of edges, so their spectra can be compared
against a reference graph with matched node and edge counts. BA and WS
naturally hit only multiples of their degree parameters, so a random
add/remove adjustment closes the gap.
"""
from __future__ import annotations

import numpy as np

from .graphs import ConnectivityGraph

DEFAULT_WS_REWIRE = 0.2


def _max_edges(n: int) -> int:
    return n * (n - 1) // 2


def _validate_counts(n: int, m: int) -> None:
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n}")
    if m < 0 or m > _max_edges(n):
        raise ValueError(f"edge count m={m} outside [0, {_max_edges(n)}] for n={n}")


def _graph_from_adjacency(adj: np.ndarray) -> ConnectivityGraph:
    np.fill_diagonal(adj, 0.0)
    return ConnectivityGraph(adj)


def _adjust_edge_count(adj: np.ndarray, m: int, rng: np.random.Generator) -> None:
    """Randomly add absent pairs or remove edges until exactly m edges remain."""
    iu, ju = np.triu_indices(adj.shape[0], k=1)
    present = adj[iu, ju] > 0
    current = int(np.count_nonzero(present))
    if current > m:
        edge_positions = np.flatnonzero(present)
        drop = rng.choice(edge_positions, size=current - m, replace=False)
        adj[iu[drop], ju[drop]] = 0.0
        adj[ju[drop], iu[drop]] = 0.0
    elif current < m:
        hole_positions = np.flatnonzero(~present)
        add = rng.choice(hole_positions, size=m - current, replace=False)
        adj[iu[add], ju[add]] = 1.0
        adj[ju[add], iu[add]] = 1.0


def generate_er(n: int, m: int, seed: int) -> ConnectivityGraph:
    """Exactly m distinct edges sampled uniformly without replacement, unit weights."""
    _validate_counts(n, m)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    chosen = rng.choice(iu.size, size=m, replace=False)
    adj = np.zeros((n, n))
    adj[iu[chosen], ju[chosen]] = 1.0
    adj[ju[chosen], iu[chosen]] = 1.0
    return _graph_from_adjacency(adj)


def generate_ba(n: int, m: int, seed: int) -> ConnectivityGraph:
    """Preferential attachment with k = round(m/n) edges per arriving node.

    Growth starts from k unconnected seed nodes; the first arrival links to
    all of them, later arrivals pick k distinct targets with probability
    proportional to degree. Random edge additions/removals then set the edge
    count to exactly m.
    """
    _validate_counts(n, m)
    k = int(np.rint(m / n))
    if k < 1 or k >= n:
        raise ValueError(
            f"attachment parameter k=round(m/n)={k} infeasible for n={n}, m={m}"
        )
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n))
    targets = list(range(k))
    repeated: list[int] = []
    for new in range(k, n):
        for t in targets:
            adj[new, t] = 1.0
            adj[t, new] = 1.0
        repeated.extend(targets)
        repeated.extend([new] * k)
        picked: set[int] = set()
        while len(picked) < k:
            picked.add(repeated[rng.integers(len(repeated))])
        targets = sorted(picked)
    _adjust_edge_count(adj, m, rng)
    return _graph_from_adjacency(adj)


def generate_ws(n: int, m: int, rewire_p: float = DEFAULT_WS_REWIRE, seed: int = 0) -> ConnectivityGraph:
    """Ring lattice with k = round(2m/n) neighbors, each edge rewired with probability p.

    k must be even and at least 2. Rewiring moves the far endpoint of a
    lattice edge to a uniform random node, avoiding self-loops and duplicate
    edges; it preserves the edge count, and a final adjustment matches m
    exactly when the lattice could not.
    """
    _validate_counts(n, m)
    if not 0 <= rewire_p <= 1:
        raise ValueError(f"rewiring probability must be in [0, 1], got {rewire_p}")
    k = int(np.rint(2 * m / n))
    if k < 2 or k % 2 != 0 or k >= n:
        raise ValueError(
            f"ring-lattice degree k=round(2m/n)={k} infeasible (must be even, >=2, <n)"
        )
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n))
    for offset in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + offset) % n
            adj[i, j] = 1.0
            adj[j, i] = 1.0
    for offset in range(1, k // 2 + 1):
        for i in range(n):
            if rng.random() >= rewire_p:
                continue
            j = (i + offset) % n
            if adj[i, j] == 0:  # already rewired away earlier in the sweep
                continue
            if np.count_nonzero(adj[i]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(n))
                if w != i and adj[i, w] == 0:
                    break
            adj[i, j] = 0.0
            adj[j, i] = 0.0
            adj[i, w] = 1.0
            adj[w, i] = 1.0
    _adjust_edge_count(adj, m, rng)
    return _graph_from_adjacency(adj)


def generate(model: str, n: int, m: int, seed: int, ws_rewire: float = DEFAULT_WS_REWIRE) -> ConnectivityGraph:
    """Dispatch one of the named models: ``er``, ``ba`` or ``ws``."""
    model = model.lower()
    if model == "er":
        return generate_er(n, m, seed)
    if model == "ba":
        return generate_ba(n, m, seed)
    if model == "ws":
        return generate_ws(n, m, ws_rewire, seed)
    raise ValueError(f"unknown random-graph model {model!r}; expected er, ba or ws")
