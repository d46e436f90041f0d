"""Plain-text loaders and writers for matrices, manifests, coordinates and Gram files.

Formats are deliberately simple and diffable:

* matrix file:      n lines of n numeric fields, comma- or whitespace-delimited
* coordinates file: CSV ``x,y,z``, one line per node, no header
* manifest:         CSV with header ``path,label,subject_id``
* Gram file:        first line ``n``, then n lines of n fields

Numbers are written with 17 significant digits, so round-trips reproduce
float64 values exactly. All loaders are pure functions of file content.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import ConnectivityGraph

#: matrices whose relative asymmetry exceeds this emit a warning before averaging
ASYMMETRY_WARN_TOL = 1e-6

_FLOAT_FMT = "%.17g"


class DataFormatError(ValueError):
    """An input file violates its expected format."""


class AsymmetryWarning(UserWarning):
    """A matrix was noticeably asymmetric before symmetrization."""


def _parse_numeric_rows(path: Path, lines) -> list[list[float]]:
    rows = []
    for line_no, line in lines:
        tokens = line.replace(",", " ").split()
        row = []
        for col, token in enumerate(tokens, start=1):
            try:
                value = float(token)
            except ValueError:
                raise DataFormatError(
                    f"{path}: non-numeric token {token!r} at row {line_no}, column {col}"
                ) from None
            if not math.isfinite(value):
                raise DataFormatError(
                    f"{path}: non-finite value at row {line_no}, column {col}"
                )
            row.append(value)
        rows.append((line_no, row))
    return rows


def load_matrix(path, subject_id: str | None = None) -> ConnectivityGraph:
    """Read a square nonnegative matrix, symmetrize by averaging, zero the diagonal.

    Asymmetry beyond a relative 1e-6 emits an :class:`AsymmetryWarning`
    before averaging. Negative, non-numeric or non-finite entries and
    non-square layouts are reported with their row/column location.
    """
    path = Path(path)
    lines = [
        (line_no, line)
        for line_no, line in enumerate(path.read_text().splitlines(), start=1)
        if line.strip()
    ]
    if not lines:
        raise DataFormatError(f"{path}: empty matrix file")
    rows = _parse_numeric_rows(path, lines)
    n = len(rows)
    for line_no, row in rows:
        if len(row) != n:
            raise DataFormatError(
                f"{path}: row {line_no} has {len(row)} fields, expected {n} "
                f"(matrix must be square)"
            )
        for col, value in enumerate(row, start=1):
            if value < 0:
                raise DataFormatError(
                    f"{path}: negative entry {value} at row {line_no}, column {col}"
                )
    m = np.array([row for _, row in rows], dtype=float)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    asym = float(np.max(np.abs(m - m.T)))
    if scale > 0 and asym > ASYMMETRY_WARN_TOL * scale:
        warnings.warn(
            f"{path}: matrix asymmetry {asym:.3e} exceeds relative {ASYMMETRY_WARN_TOL:g}; "
            f"averaging with its transpose",
            AsymmetryWarning,
            stacklevel=2,
        )
    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return ConnectivityGraph(m, subject_id=subject_id)


def save_matrix(graph_or_values, path) -> None:
    """Write a matrix as n lines of n space-separated fields."""
    values = (
        graph_or_values.weights
        if isinstance(graph_or_values, ConnectivityGraph)
        else np.asarray(graph_or_values, dtype=float)
    )
    with open(path, "w") as fh:
        for row in values:
            fh.write(" ".join(_FLOAT_FMT % x for x in row) + "\n")


def load_coordinates(path) -> np.ndarray:
    """Read node coordinates: one ``x,y,z`` line per node, no header."""
    path = Path(path)
    lines = [
        (line_no, line)
        for line_no, line in enumerate(path.read_text().splitlines(), start=1)
        if line.strip()
    ]
    if not lines:
        raise DataFormatError(f"{path}: empty coordinates file")
    rows = _parse_numeric_rows(path, lines)
    for line_no, row in rows:
        if len(row) != 3:
            raise DataFormatError(
                f"{path}: row {line_no} has {len(row)} fields, expected 3 (x,y,z)"
            )
    return np.array([row for _, row in rows], dtype=float)


@dataclass(frozen=True)
class ManifestEntry:
    matrix_path: str
    label: int
    subject_id: str


@dataclass
class DatasetManifest:
    """Ordered list of (matrix path, binary label, subject id) records."""

    entries: list[ManifestEntry]
    root: Path

    @property
    def labels(self) -> np.ndarray:
        return np.array([e.label for e in self.entries], dtype=int)

    @property
    def subject_ids(self) -> list[str]:
        return [e.subject_id for e in self.entries]

    def resolve(self, entry: ManifestEntry) -> Path:
        p = Path(entry.matrix_path)
        return p if p.is_absolute() else self.root / p


MANIFEST_HEADER = ["path", "label", "subject_id"]


def load_manifest(path) -> DatasetManifest:
    """Read a dataset manifest; labels must be 0/1 and subject ids unique."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty manifest") from None
        if [h.strip() for h in header] != MANIFEST_HEADER:
            raise DataFormatError(
                f"{path}: manifest header must be {','.join(MANIFEST_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )
        entries = []
        seen = set()
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataFormatError(
                    f"{path}: line {line_no} has {len(row)} fields, expected 3"
                )
            raw_path, raw_label, subject_id = (field.strip() for field in row)
            if raw_label not in ("0", "1"):
                raise DataFormatError(
                    f"{path}: line {line_no}: label must be 0 or 1, got {raw_label!r}"
                )
            if subject_id in seen:
                raise DataFormatError(
                    f"{path}: line {line_no}: duplicate subject_id {subject_id!r}"
                )
            seen.add(subject_id)
            entries.append(ManifestEntry(raw_path, int(raw_label), subject_id))
    if not entries:
        raise DataFormatError(f"{path}: manifest lists no subjects")
    return DatasetManifest(entries=entries, root=path.parent)


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for entry in manifest.entries:
            writer.writerow([entry.matrix_path, entry.label, entry.subject_id])


def load_dataset(manifest: DatasetManifest, coordinates_path=None):
    """Load every matrix named by a manifest; returns (graphs, labels).

    Matrix paths resolve relative to the manifest's directory. Coordinates,
    when given, are attached to every graph and must match its node count.
    """
    coordinates = load_coordinates(coordinates_path) if coordinates_path is not None else None
    graphs = []
    for entry in manifest.entries:
        matrix_path = manifest.resolve(entry)
        if not matrix_path.exists():
            raise DataFormatError(
                f"matrix file {matrix_path} for subject {entry.subject_id!r} does not exist"
            )
        g = load_matrix(matrix_path, subject_id=entry.subject_id)
        if coordinates is not None:
            if coordinates.shape[0] != g.n:
                raise DataFormatError(
                    f"coordinates list {coordinates.shape[0]} nodes but subject "
                    f"{entry.subject_id!r} has {g.n}"
                )
            g = ConnectivityGraph(g.weights, coordinates, entry.subject_id)
        graphs.append(g)
    return graphs, manifest.labels


def save_gram(gram, path) -> None:
    """Write a Gram (or distance) matrix: first line n, then n rows of n fields."""
    from .kernels import GramMatrix  # local import to keep io free of kernel deps

    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {values.shape}")
    asym = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    if asym > 1e-12 * max(float(np.max(np.abs(values))), 1.0):
        raise ValueError(f"refusing to save asymmetric Gram matrix (max asymmetry {asym:.3e})")
    with open(path, "w") as fh:
        fh.write(f"{values.shape[0]}\n")
        for row in values:
            fh.write(" ".join(_FLOAT_FMT % x for x in row) + "\n")


def load_gram(path):
    """Read a Gram file back into a :class:`~spectremd.kernels.GramMatrix`."""
    from .kernels import GramMatrix

    path = Path(path)
    lines = [
        (line_no, line)
        for line_no, line in enumerate(path.read_text().splitlines(), start=1)
        if line.strip()
    ]
    if not lines:
        raise DataFormatError(f"{path}: empty Gram file")
    try:
        n = int(lines[0][1].strip())
    except ValueError:
        raise DataFormatError(f"{path}: first line must be the matrix size") from None
    rows = _parse_numeric_rows(path, lines[1:])
    if len(rows) != n:
        raise DataFormatError(f"{path}: expected {n} matrix rows, found {len(rows)}")
    for line_no, row in rows:
        if len(row) != n:
            raise DataFormatError(
                f"{path}: row {line_no} has {len(row)} fields, expected {n}"
            )
    return GramMatrix.from_values(np.array([row for _, row in rows], dtype=float))


def save_spectrum(spectrum, path) -> None:
    """Write eigenvalues one per line, ascending."""
    values = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    with open(path, "w") as fh:
        for value in values:
            fh.write(_FLOAT_FMT % value + "\n")


def load_spectrum(path) -> np.ndarray:
    path = Path(path)
    values = [float(line) for line in path.read_text().split()]
    return np.array(values, dtype=float)


def save_density(curve, path) -> None:
    """Write a density curve as CSV ``x,f`` pairs with a header."""
    with open(path, "w") as fh:
        fh.write("x,f\n")
        for x, f in zip(curve.grid, curve.density):
            fh.write(f"{_FLOAT_FMT % x},{_FLOAT_FMT % f}\n")
