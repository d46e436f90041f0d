"""Symmetric eigendecomposition, validated spectra and Gaussian density curves.

The spectrum of a graph is the sorted multiset of eigenvalues of its
normalized Laplacian; all values lie in [0, 2] up to roundoff, which is
clamped away under a tight tolerance. Multiplicities are preserved exactly
because repeated eigenvalues carry structural information. Density curves
convolve the eigenvalues with a Gaussian kernel for plotting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import ConnectivityGraph, normalized_laplacian

#: eigenvalues may stray outside [0, 2] by at most this much before clamping
EDGE_TOL = 1e-9

#: relative symmetry tolerance accepted by the eigensolver
SYMMETRY_TOL = 1e-10

#: Gaussian bandwidth used for density plots
DEFAULT_SIGMA = 0.02


class ConvergenceError(RuntimeError):
    """A numerical solver failed to converge; indicates a defect, not a data condition."""


def eigenvalues_symmetric(m: np.ndarray, return_vectors: bool = False):
    """Eigenvalues of a symmetric matrix, ascending.

    Backed by the dense symmetric LAPACK driver. With ``return_vectors`` the
    orthonormal eigenvector matrix is returned as well (columns match the
    eigenvalue order); the pipeline itself never needs vectors, so the
    default path skips them.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > SYMMETRY_TOL * max(scale, 1.0):
        raise ValueError(
            f"matrix is not symmetric: max |m - m.T| = {asym:.3e} exceeds tolerance"
        )
    try:
        if return_vectors:
            values, vectors = np.linalg.eigh(m)
            return values, vectors
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed to converge: {exc}") from exc


@dataclass
class Spectrum:
    """Ascending normalized-Laplacian eigenvalues, validated to lie in [0, 2].

    Every normalized Laplacian has eigenvalue 0, so a valid spectrum contains
    at least one value within ``EDGE_TOL`` of zero.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("spectrum must be a nonempty 1-D vector")
        if np.any(np.diff(v) < 0):
            raise ValueError("spectrum values must be sorted ascending")
        if v[0] < 0 or v[-1] > 2:
            raise ValueError(f"spectrum values outside [0, 2]: min={v[0]}, max={v[-1]}")
        if v[0] > EDGE_TOL:
            raise ValueError(
                f"spectrum is missing eigenvalue 0 (smallest value {v[0]:.3e})"
            )
        self.values = v

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size


def clamp_eigenvalues(values: np.ndarray, edge_tol: float = EDGE_TOL) -> np.ndarray:
    """Clamp roundoff-level excursions outside [0, 2] to the boundary.

    Violations beyond ``edge_tol`` raise :class:`ConvergenceError`: a valid
    normalized Laplacian cannot produce them, so they indicate solver
    failure rather than a data condition.
    """
    v = np.asarray(values, dtype=float)
    if np.any(v < -edge_tol) or np.any(v > 2 + edge_tol):
        raise ConvergenceError(
            f"eigenvalues outside [-{edge_tol:g}, 2+{edge_tol:g}]: "
            f"min={v.min():.6e}, max={v.max():.6e}"
        )
    return np.clip(v, 0.0, 2.0)


def spectrum_of(g: ConnectivityGraph) -> Spectrum:
    """Validated spectrum of the graph's normalized Laplacian."""
    lap = normalized_laplacian(g)
    values = eigenvalues_symmetric(lap)
    return Spectrum(clamp_eigenvalues(values))


@dataclass
class DensityCurve:
    """Gaussian-smoothed eigenvalue density sampled on an ascending grid."""

    grid: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.grid.shape != self.density.shape or self.grid.ndim != 1:
            raise ValueError("grid and density must be 1-D arrays of equal length")
        if np.any(self.density < 0):
            raise ValueError("density values must be nonnegative")

    def integral(self) -> float:
        """Trapezoid integral of the curve over its grid."""
        return float(np.trapezoid(self.density, self.grid))


def default_density_grid(start: float = -0.1, stop: float = 2.1, step: float = 0.002) -> np.ndarray:
    """Plotting grid covering [0, 2] with margin for the Gaussian tails."""
    return np.arange(start, stop + step / 2, step)


def density_curve(eigenvalues, sigma: float = DEFAULT_SIGMA, grid: np.ndarray | None = None) -> DensityCurve:
    """Sum of unit Gaussians centered at the eigenvalues, evaluated on the grid.

    f(x) = sum_j (2*pi*sigma^2)^{-1/2} exp(-(x - s_j)^2 / (2 sigma^2))

    Accepts a :class:`Spectrum` or any 1-D array of values. Integrates to the
    number of eigenvalues when the grid covers all the mass.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    values = eigenvalues.values if isinstance(eigenvalues, Spectrum) else np.asarray(eigenvalues, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("eigenvalues must be a nonempty 1-D vector")
    if grid is None:
        grid = default_density_grid()
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    diff = grid[:, None] - values[None, :]
    density = np.exp(-(diff * diff) / (2.0 * sigma * sigma)).sum(axis=1)
    density /= sigma * np.sqrt(2.0 * np.pi)
    return DensityCurve(grid, density)
