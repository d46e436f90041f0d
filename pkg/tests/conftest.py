import numpy as np
import pytest

from spectremd import ConnectivityGraph


def random_connectome(rng, n, density=0.3, weight_range=(0.5, 3.0)) -> ConnectivityGraph:
    """Random symmetric nonnegative weighted graph; isolated nodes allowed."""
    mask = np.triu(rng.random((n, n)) < density, k=1)
    w = np.zeros((n, n))
    w[mask] = rng.uniform(*weight_range, size=int(mask.sum()))
    return ConnectivityGraph(w + w.T)


def random_symmetric(rng, n, scale=1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_dataset(tmp_path, graphs, labels, coordinates=None, name="manifest.csv"):
    """Write matrices plus a manifest (and optional coordinates); returns paths."""
    lines = ["path,label,subject_id"]
    for i, (g, label) in enumerate(zip(graphs, labels)):
        matrix_name = f"subject{i:03d}.txt"
        with open(tmp_path / matrix_name, "w") as fh:
            for row in g.weights:
                fh.write(" ".join("%.17g" % x for x in row) + "\n")
        lines.append(f"{matrix_name},{int(label)},s{i:03d}")
    manifest_path = tmp_path / name
    manifest_path.write_text("\n".join(lines) + "\n")
    coords_path = None
    if coordinates is not None:
        coords_path = tmp_path / "coords.csv"
        with open(coords_path, "w") as fh:
            for row in coordinates:
                fh.write(",".join("%.17g" % x for x in row) + "\n")
    return manifest_path, coords_path
