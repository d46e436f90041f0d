"""Binary soft-margin SVM on a precomputed kernel matrix.

Solves the standard dual

    max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

by pairwise coordinate ascent on the maximal KKT-violating pair. The
decision function exposes continuous values for rank-based evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import GramMatrix
from .spectral import ConvergenceError

#: convergence threshold on the KKT violation gap, in decision-value units
KKT_TOL = 1e-3

#: hard cap on pairwise update passes; exceeding it signals a defect
MAX_ITER = 100_000

#: curvature floor for the two-variable subproblem
_TAU = 1e-12


@dataclass
class TrainedSvm:
    """Dual solution of the soft-margin SVM.

    ``alphas`` are the dual coefficients (in [0, C]) over the training
    points, ``support_indices`` the training indices with positive alpha.
    The decision value of a point x is sum_i alphas_i y_i K(x_i, x) + bias.
    """

    alphas: np.ndarray
    bias: float
    support_indices: np.ndarray
    labels: np.ndarray
    C: float
    iterations: int
    kkt_violation: float


def _as_kernel_values(gram) -> np.ndarray:
    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"kernel matrix must be square, got shape {values.shape}")
    asym = np.max(np.abs(values - values.T))
    if asym > 1e-10 * max(np.max(np.abs(values)), 1.0):
        raise ValueError(f"kernel matrix is not symmetric (max asymmetry {asym:.3e})")
    return values


def svm_train(gram, labels, C: float, tol: float = KKT_TOL, max_iter: int = MAX_ITER) -> TrainedSvm:
    """Train on a precomputed kernel and (-1, +1) labels.

    Selection always picks the pair with the largest KKT violation, so the
    result is deterministic for identical inputs.
    """
    K = _as_kernel_values(gram)
    y = np.asarray(labels, dtype=float)
    if y.shape != (K.shape[0],):
        raise ValueError(f"labels shape {y.shape} does not match kernel size {K.shape[0]}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("training labels must contain both classes")
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")

    n = y.size
    Q = K * np.outer(y, y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - sum(a)

    iterations = 0
    gap = np.inf
    for iterations in range(1, max_iter + 1):
        neg_y_grad = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        i = int(np.argmax(np.where(up, neg_y_grad, -np.inf)))
        j = int(np.argmin(np.where(low, neg_y_grad, np.inf)))
        gap = neg_y_grad[i] - neg_y_grad[j]
        if gap <= tol:
            break

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(Q[i, i] + Q[j, j] + 2.0 * Q[i, j], _TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = max(Q[i, i] + Q[j, j] - 2.0 * Q[i, j], _TAU)
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += Q[:, i] * (alpha[i] - old_i) + Q[:, j] * (alpha[j] - old_j)
    else:
        raise ConvergenceError(
            f"SMO did not converge within {max_iter} passes (gap {gap:.3e})"
        )

    bias = _bias(alpha, grad, y, C)
    return TrainedSvm(
        alphas=alpha,
        bias=bias,
        support_indices=np.flatnonzero(alpha > 0),
        labels=y,
        C=C,
        iterations=iterations,
        kkt_violation=float(gap),
    )


def _bias(alpha, grad, y, C) -> float:
    """Average -y*grad over free support vectors; at-bound interval midpoint otherwise."""
    candidates = -y * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        return float(candidates[free].mean())
    lower = ((y > 0) & (alpha <= 0)) | ((y < 0) & (alpha >= C))
    upper = ((y > 0) & (alpha >= C)) | ((y < 0) & (alpha <= 0))
    lo = candidates[lower].max() if np.any(lower) else -np.inf
    hi = candidates[upper].min() if np.any(upper) else np.inf
    if np.isinf(lo) and np.isinf(hi):
        return 0.0
    if np.isinf(lo):
        return float(hi)
    if np.isinf(hi):
        return float(lo)
    return float((lo + hi) / 2.0)


def svm_decision(model: TrainedSvm, kernel_row) -> float:
    """Decision value for one point given its kernel values against the training set."""
    row = np.asarray(kernel_row, dtype=float)
    if row.shape != model.alphas.shape:
        raise ValueError(
            f"kernel row length {row.size} does not match training size {model.alphas.size}"
        )
    return float(row @ (model.alphas * model.labels) + model.bias)


def svm_decisions(model: TrainedSvm, kernel_rows) -> np.ndarray:
    """Decision values for several points (rows of kernel values against training points)."""
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=float))
    if rows.shape[1] != model.alphas.size:
        raise ValueError(
            f"kernel rows have {rows.shape[1]} columns, expected {model.alphas.size}"
        )
    return rows @ (model.alphas * model.labels) + model.bias


def dual_objective(alphas, gram, labels) -> float:
    """Dual objective sum(a) - 1/2 a'(yy' * K)a for a candidate solution."""
    K = _as_kernel_values(gram)
    a = np.asarray(alphas, dtype=float)
    y = np.asarray(labels, dtype=float)
    return float(a.sum() - 0.5 * (a * y) @ K @ (a * y))


def kkt_violation(alphas, gram, labels, C: float) -> float:
    """Maximal violating-pair gap, computable from any feasible dual point."""
    K = _as_kernel_values(gram)
    a = np.asarray(alphas, dtype=float)
    y = np.asarray(labels, dtype=float)
    grad = (K * np.outer(y, y)) @ a - 1.0
    neg_y_grad = -y * grad
    up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
    low = ((y < 0) & (a < C)) | ((y > 0) & (a > 0))
    if not np.any(up) or not np.any(low):
        return 0.0
    return float(neg_y_grad[up].max() - neg_y_grad[low].min())
