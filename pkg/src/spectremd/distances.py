"""Earth mover's distance between eigenvalue samples.

Two routes compute the same quantity: a closed-form fast path for equal-size
uniform-mass samples (mean absolute difference of sorted values), and an
exact transportation-simplex LP that also handles unequal sizes and returns
the optimal flow matrix. The LP doubles as an independent check on the fast
path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ConvergenceError, Spectrum

#: reduced costs above -PIVOT_TOL are treated as nonnegative (optimal)
PIVOT_TOL = 1e-12


def _sample_values(x) -> np.ndarray:
    values = x.values if isinstance(x, Spectrum) else np.asarray(x, dtype=float)
    values = np.ravel(values)
    if values.size == 0:
        raise ValueError("sample must be nonempty")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample contains non-finite values")
    return values


def emd_sorted(s, t) -> float:
    """Exact earth mover's distance for equal-size samples with uniform masses.

    In one dimension the optimal transport pairs the k-th smallest points,
    so the distance is the mean absolute difference of the sorted samples.
    """
    a = _sample_values(s)
    b = _sample_values(t)
    if a.size != b.size:
        raise ValueError(f"sample sizes differ ({a.size} vs {b.size}); use emd_lp")
    return float(np.abs(np.sort(a) - np.sort(b)).mean())


@dataclass
class TransportPlan:
    """Optimal flow matrix between two uniform-mass samples.

    Row sums equal 1/n and column sums equal 1/m, where n and m are the
    sample sizes; all flows are nonnegative. ``cost`` is the total
    (unnormalized) transport cost sum_kl f_kl |s_k - t_l|.
    """

    flows: np.ndarray
    cost: float


def emd_lp(s, t) -> tuple[float, TransportPlan]:
    """Solve the transportation problem exactly with a specialized simplex.

    Returns the normalized optimal cost (total cost divided by total flow,
    which the constraints force to one) and an optimal basic feasible plan.
    Bland's smallest-index rule on entering variables prevents cycling.
    """
    a = _sample_values(s)
    b = _sample_values(t)
    n, m = a.size, b.size
    cost = np.abs(a[:, None] - b[None, :])
    supply = np.full(n, 1.0 / n)
    demand = np.full(m, 1.0 / m)

    flows, basis = _northwest_corner(supply, demand)
    max_pivots = 20 * n * m + 200
    for _ in range(max_pivots):
        u, v = _potentials(cost, basis, n, m)
        entering = _entering_cell(cost, u, v, basis)
        if entering is None:
            break
        _pivot(flows, basis, entering, n, m)
    else:
        raise ConvergenceError("transportation simplex exceeded its pivot budget")

    np.clip(flows, 0.0, None, out=flows)
    total_cost = float((flows * cost).sum())
    total_flow = float(flows.sum())
    return total_cost / total_flow, TransportPlan(flows=flows, cost=total_cost)


def emd(s, t) -> float:
    """Earth mover's distance; sorted fast path when sizes match, LP otherwise."""
    a = _sample_values(s)
    b = _sample_values(t)
    if a.size == b.size:
        return emd_sorted(a, b)
    return emd_lp(a, b)[0]


def pairwise_distances(spectra) -> np.ndarray:
    """Symmetric matrix of earth mover's distances between equal-length spectra."""
    samples = [np.sort(_sample_values(s)) for s in spectra]
    count = len(samples)
    if count == 0:
        raise ValueError("need at least one spectrum")
    length = samples[0].size
    for idx, sample in enumerate(samples):
        if sample.size != length:
            raise ValueError(
                f"spectrum {idx} has length {sample.size}, expected {length}"
            )
    delta = np.zeros((count, count))
    for i in range(count):
        for j in range(i + 1, count):
            d = float(np.abs(samples[i] - samples[j]).mean())
            delta[i, j] = d
            delta[j, i] = d
    return delta


def _northwest_corner(supply: np.ndarray, demand: np.ndarray):
    """Initial basic feasible solution with exactly n + m - 1 basic cells."""
    n, m = supply.size, demand.size
    flows = np.zeros((n, m))
    remaining_supply = supply.copy()
    remaining_demand = demand.copy()
    basis: list[tuple[int, int]] = []
    i = j = 0
    while True:
        f = min(remaining_supply[i], remaining_demand[j])
        flows[i, j] = f
        basis.append((i, j))
        remaining_supply[i] -= f
        remaining_demand[j] -= f
        if i == n - 1 and j == m - 1:
            break
        # On simultaneous exhaustion advance one direction only, leaving a
        # zero-flow basic cell, so the basis always forms a spanning tree.
        if remaining_supply[i] <= 1e-15 and i < n - 1:
            i += 1
        else:
            j += 1
    return flows, basis


def _potentials(cost: np.ndarray, basis: list[tuple[int, int]], n: int, m: int):
    """Dual potentials solving u_k + v_l = c_kl on the basis tree."""
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n + m)]
    for k, l in basis:
        adjacency[k].append((n + l, k * m + l))
        adjacency[n + l].append((k, k * m + l))
    u = np.zeros(n)
    v = np.zeros(m)
    seen = np.zeros(n + m, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        node = stack.pop()
        for neighbor, cell in adjacency[node]:
            if seen[neighbor]:
                continue
            seen[neighbor] = True
            k, l = divmod(cell, m)
            if neighbor >= n:
                v[neighbor - n] = cost[k, l] - u[k]
            else:
                u[neighbor] = cost[k, l] - v[l]
            stack.append(neighbor)
    if not seen.all():
        raise ConvergenceError("transportation basis is not a spanning tree")
    return u, v


def _entering_cell(cost, u, v, basis) -> tuple[int, int] | None:
    """First nonbasic cell (row-major) with negative reduced cost, or None."""
    reduced = cost - u[:, None] - v[None, :]
    for k, l in basis:
        reduced[k, l] = 0.0
    candidates = np.argwhere(reduced < -PIVOT_TOL)
    if candidates.size == 0:
        return None
    k, l = candidates[0]
    return int(k), int(l)


def _pivot(flows, basis, entering, n, m):
    """Push flow around the unique basis cycle closed by the entering cell."""
    basis_set = set(basis)
    adjacency: list[list[int]] = [[] for _ in range(n + m)]
    for k, l in basis:
        adjacency[k].append(n + l)
        adjacency[n + l].append(k)

    # Path in the basis tree from the entering cell's row to its column.
    start, goal = entering[0], n + entering[1]
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for neighbor in adjacency[node]:
            if neighbor not in parent:
                parent[neighbor] = node
                stack.append(neighbor)
    path_nodes = [goal]
    while path_nodes[-1] != start:
        path_nodes.append(parent[path_nodes[-1]])
    path_nodes.reverse()

    # Cells along the path; even positions lose flow, odd positions gain.
    path_cells = []
    for a, b in zip(path_nodes, path_nodes[1:]):
        row, col = (a, b - n) if a < n else (b, a - n)
        path_cells.append((row, col))
    minus_cells = path_cells[0::2]
    plus_cells = path_cells[1::2]

    theta = min(flows[c] for c in minus_cells)
    leaving = min((c for c in minus_cells if flows[c] <= theta), key=lambda c: c)

    flows[entering] += theta
    for c in plus_cells:
        flows[c] += theta
    for c in minus_cells:
        flows[c] -= theta
    flows[leaving] = 0.0

    basis_set.discard(leaving)
    basis_set.add(entering)
    basis[:] = sorted(basis_set)
