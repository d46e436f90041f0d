import numpy as np
import pytest

from spectremd import (
    AsymmetryWarning,
    DataFormatError,
    GramMatrix,
    load_dataset,
    load_gram,
    load_manifest,
    load_matrix,
    save_gram,
    save_matrix,
)
from spectremd.io import load_coordinates, load_spectrum, save_spectrum

from conftest import random_connectome


def test_load_matrix_comma_delimited(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,3\n3,0\n")
    g = load_matrix(p)
    assert g.n == 2
    assert g.weights[0, 1] == 3.0
    assert g.weights[1, 0] == 3.0
    assert g.weights[0, 0] == 0.0


def test_load_matrix_whitespace_delimited(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0 1.5\n1.5 0\n")
    assert load_matrix(p).weights[0, 1] == 1.5


def test_load_matrix_symmetrizes_by_averaging(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,3\n1,0\n")
    with pytest.warns(AsymmetryWarning):
        g = load_matrix(p)
    assert g.weights[0, 1] == 2.0  # (3 + 1) / 2


def test_load_matrix_mild_asymmetry_silent(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,3.0000000001\n3,0\n")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", AsymmetryWarning)
        g = load_matrix(p)
    assert g.weights[0, 1] == pytest.approx(3.00000000005)


def test_load_matrix_zeroes_diagonal(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("7,1\n1,9\n")
    g = load_matrix(p)
    assert g.weights[0, 0] == 0.0 and g.weights[1, 1] == 0.0


def test_load_matrix_negative_entry_names_cell(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,1,2\n1,0,3\n2,-3,0\n")
    with pytest.raises(DataFormatError, match=r"row 3, column 2"):
        load_matrix(p)


def test_load_matrix_non_numeric_token(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,x\n1,0\n")
    with pytest.raises(DataFormatError, match=r"row 1, column 2"):
        load_matrix(p)


def test_load_matrix_non_square(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,1,2\n1,0,3\n")
    with pytest.raises(DataFormatError, match="square"):
        load_matrix(p)


def test_load_matrix_empty_file(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("")
    with pytest.raises(DataFormatError, match="empty"):
        load_matrix(p)


def test_load_matrix_rejects_nan(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0,nan\nnan,0\n")
    with pytest.raises(DataFormatError, match="non-finite"):
        load_matrix(p)


def test_matrix_roundtrip_exact(tmp_path, rng):
    g = random_connectome(rng, 17)
    save_matrix(g, tmp_path / "m.txt")
    back = load_matrix(tmp_path / "m.txt")
    assert np.array_equal(back.weights, g.weights)


def test_load_matrix_result_is_symmetric_with_zero_diagonal(tmp_path, rng):
    raw = rng.uniform(0, 5, size=(9, 9))
    with open(tmp_path / "m.txt", "w") as fh:
        for row in raw:
            fh.write(",".join("%.17g" % x for x in row) + "\n")
    with pytest.warns(AsymmetryWarning):
        g = load_matrix(tmp_path / "m.txt")
    assert np.array_equal(g.weights, g.weights.T)
    assert np.all(np.diagonal(g.weights) == 0)


def test_load_manifest(tmp_path):
    p = tmp_path / "manifest.csv"
    p.write_text("path,label,subject_id\na.txt,0,s1\nb.txt,1,s2\nc.txt,1,s3\n")
    manifest = load_manifest(p)
    assert len(manifest.entries) == 3
    assert manifest.labels.tolist() == [0, 1, 1]
    assert manifest.subject_ids == ["s1", "s2", "s3"]


def test_load_manifest_bad_label(tmp_path):
    p = tmp_path / "manifest.csv"
    p.write_text("path,label,subject_id\na.txt,2,s1\n")
    with pytest.raises(DataFormatError, match="label"):
        load_manifest(p)


def test_load_manifest_duplicate_subject(tmp_path):
    p = tmp_path / "manifest.csv"
    p.write_text("path,label,subject_id\na.txt,0,s1\nb.txt,1,s1\n")
    with pytest.raises(DataFormatError, match="duplicate"):
        load_manifest(p)


def test_load_manifest_bad_header(tmp_path):
    p = tmp_path / "manifest.csv"
    p.write_text("file,y,id\na.txt,0,s1\n")
    with pytest.raises(DataFormatError, match="header"):
        load_manifest(p)


def test_load_dataset_missing_matrix_names_subject(tmp_path):
    p = tmp_path / "manifest.csv"
    p.write_text("path,label,subject_id\nmissing.txt,0,s1\n")
    with pytest.raises(DataFormatError, match="s1"):
        load_dataset(load_manifest(p))


def test_load_dataset_attaches_coordinates(tmp_path, rng):
    g = random_connectome(rng, 5)
    save_matrix(g, tmp_path / "a.txt")
    (tmp_path / "manifest.csv").write_text("path,label,subject_id\na.txt,1,s1\n")
    coords = rng.uniform(-50, 50, size=(5, 3))
    with open(tmp_path / "coords.csv", "w") as fh:
        for row in coords:
            fh.write(",".join("%.17g" % x for x in row) + "\n")
    graphs, labels = load_dataset(load_manifest(tmp_path / "manifest.csv"), tmp_path / "coords.csv")
    assert np.array_equal(graphs[0].coordinates, coords)
    assert labels.tolist() == [1]


def test_load_dataset_coordinate_count_mismatch(tmp_path, rng):
    g = random_connectome(rng, 5)
    save_matrix(g, tmp_path / "a.txt")
    (tmp_path / "manifest.csv").write_text("path,label,subject_id\na.txt,1,s1\n")
    (tmp_path / "coords.csv").write_text("0,0,0\n1,1,1\n")
    with pytest.raises(DataFormatError, match="nodes"):
        load_dataset(load_manifest(tmp_path / "manifest.csv"), tmp_path / "coords.csv")


def test_load_coordinates_wrong_field_count(tmp_path):
    (tmp_path / "coords.csv").write_text("0,0\n")
    with pytest.raises(DataFormatError, match="expected 3"):
        load_coordinates(tmp_path / "coords.csv")


def test_gram_roundtrip_identity(tmp_path):
    gram = GramMatrix.from_values(np.eye(2))
    save_gram(gram, tmp_path / "g.txt")
    back = load_gram(tmp_path / "g.txt")
    assert np.array_equal(back.values, np.eye(2))


def test_gram_roundtrip_large_random(tmp_path, rng):
    a = rng.standard_normal((94, 94))
    sym = (a + a.T) / 2.0
    save_gram(sym, tmp_path / "g.txt")
    back = load_gram(tmp_path / "g.txt")
    assert np.max(np.abs(back.values - sym)) < 1e-12
    assert np.array_equal(back.values, sym)  # 17 significant digits round-trip exactly


def test_save_gram_rejects_asymmetric(tmp_path):
    with pytest.raises(ValueError, match="asymmetric"):
        save_gram(np.array([[1.0, 2.0], [0.0, 1.0]]), tmp_path / "g.txt")


def test_load_gram_row_count_mismatch(tmp_path):
    (tmp_path / "g.txt").write_text("3\n1 0\n0 1\n")
    with pytest.raises(DataFormatError):
        load_gram(tmp_path / "g.txt")


def test_spectrum_roundtrip(tmp_path):
    values = np.array([0.0, 0.5177664922663586, 2.0])
    save_spectrum(values, tmp_path / "s.csv")
    assert np.array_equal(load_spectrum(tmp_path / "s.csv"), values)
