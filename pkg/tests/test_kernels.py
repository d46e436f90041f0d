import numpy as np
import pytest

from spectremd import (
    ConnectivityGraph,
    GramMatrix,
    bag_of_edges,
    emd_kernel_gram,
    gram_for_kernel,
    linear_gram,
    scale_by_total_weight,
    spectrum_features,
    spectrum_of,
)
from spectremd.kernels import clip_to_psd, upper_triangle

from conftest import random_connectome


def random_spectra(rng, count, n=20):
    return [spectrum_of(random_connectome(rng, n, density=0.4)) for _ in range(count)]


class TestEmdKernel:
    def test_zero_distance_gives_one(self, rng):
        spectra = random_spectra(rng, 3)
        gram = emd_kernel_gram([spectra[0], spectra[0], spectra[1]])
        assert gram.values[0, 1] == pytest.approx(1.0, abs=1e-15)

    def test_log_two_distance_gives_half(self):
        # two single-spectrum "graphs" whose sorted values differ by ln 2 on average
        base = np.zeros(4)
        shifted = np.full(4, np.log(2.0))
        gram = emd_kernel_gram([base, shifted])
        assert gram.values[0, 1] == pytest.approx(0.5, rel=1e-12)

    def test_diagonal_exactly_one(self, rng):
        gram = emd_kernel_gram(random_spectra(rng, 5))
        assert np.all(np.diagonal(gram.values) == 1.0)

    def test_entries_in_unit_interval(self, rng):
        gram = emd_kernel_gram(random_spectra(rng, 8))
        assert np.all(gram.values > 0)
        assert np.all(gram.values <= 1.0)

    def test_psd_on_connectome_like_spectra(self, rng):
        gram = emd_kernel_gram(random_spectra(rng, 30, n=15))
        assert gram.min_eigenvalue >= -1e-8

    def test_gamma_bandwidth(self, rng):
        spectra = random_spectra(rng, 4)
        g1 = emd_kernel_gram(spectra, gamma=1.0)
        g2 = emd_kernel_gram(spectra, gamma=2.0)
        off = ~np.eye(4, dtype=bool)
        assert np.allclose(g2.values[off], g1.values[off] ** 2, rtol=1e-12)

    def test_gamma_must_be_positive(self, rng):
        with pytest.raises(ValueError, match="gamma"):
            emd_kernel_gram(random_spectra(rng, 2), gamma=0.0)

    def test_permutation_invariance(self, rng):
        graphs = [random_connectome(rng, 12, density=0.4) for _ in range(6)]
        gram = emd_kernel_gram([spectrum_of(g) for g in graphs])
        permuted = []
        for g in graphs:
            p = rng.permutation(12)
            permuted.append(ConnectivityGraph(g.weights[np.ix_(p, p)]))
        gram_p = emd_kernel_gram([spectrum_of(g) for g in permuted])
        assert np.allclose(gram.values, gram_p.values, rtol=0, atol=1e-12)

    def test_scaling_invariance(self, rng):
        graphs = [random_connectome(rng, 12, density=0.4) for _ in range(6)]
        gram = emd_kernel_gram([spectrum_of(g) for g in graphs])
        gram_s = emd_kernel_gram([spectrum_of(scale_by_total_weight(g)) for g in graphs])
        assert np.allclose(gram.values, gram_s.values, rtol=0, atol=1e-12)


class TestPsdHandling:
    def test_indefinite_rejected_without_clipping(self):
        values = np.array([[1.0, 0.99, 0.0], [0.99, 1.0, 0.99], [0.0, 0.99, 1.0]])
        assert GramMatrix.from_values(values).min_eigenvalue < -1e-8
        from spectremd.kernels import _checked

        with pytest.raises(ValueError, match="positive semi-definite"):
            _checked(values, clip=False)

    def test_clipping_repairs(self):
        values = np.array([[1.0, 0.99, 0.0], [0.99, 1.0, 0.99], [0.0, 0.99, 1.0]])
        clipped = clip_to_psd(values)
        assert GramMatrix.from_values(clipped).min_eigenvalue >= -1e-12
        assert np.array_equal(clipped, clipped.T)

    def test_clipping_noop_on_psd(self, rng):
        a = rng.standard_normal((6, 6))
        psd = a @ a.T
        assert np.allclose(clip_to_psd(psd), psd, atol=1e-10)


class TestLinearGram:
    def test_orthonormal_pair(self):
        gram = linear_gram([[1.0, 0.0], [0.0, 1.0]])
        assert np.array_equal(gram.values, np.eye(2))

    def test_self_inner_product(self, rng):
        x = rng.standard_normal(9)
        gram = linear_gram([x, 2 * x])
        assert gram.values[0, 0] == pytest.approx(float(x @ x), rel=1e-12)

    def test_random_features_psd(self, rng):
        features = [rng.standard_normal(6) for _ in range(10)]
        gram = linear_gram(features)
        assert gram.min_eigenvalue >= -1e-10

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            linear_gram([[1.0, 2.0], [1.0]])


class TestFeatures:
    def test_bag_of_edges_row_major(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 1.0
        w[0, 2] = w[2, 0] = 2.0
        w[1, 2] = w[2, 1] = 3.0
        assert bag_of_edges(ConnectivityGraph(w)).tolist() == [1.0, 2.0, 3.0]

    def test_bag_of_edges_length_264(self):
        g = ConnectivityGraph(np.zeros((264, 264)))
        vec = bag_of_edges(g)
        assert vec.shape == (34716,)
        assert not vec.any()

    def test_upper_triangle_ignores_lower(self, rng):
        raw = rng.uniform(0, 1, size=(6, 6))
        perturbed = raw.copy()
        perturbed[np.tril_indices(6, k=-1)] += 5.0
        assert np.array_equal(upper_triangle(raw), upper_triangle(perturbed))

    def test_spectrum_features_values(self):
        w = np.zeros((2, 2))
        w[0, 1] = w[1, 0] = 1.0
        s = spectrum_of(ConnectivityGraph(w))
        assert np.allclose(spectrum_features(s), [0.0, 2.0], atol=1e-12)

    def test_isomorphic_graphs_equal_features(self, rng):
        g = random_connectome(rng, 10, density=0.5)
        p = rng.permutation(10)
        relabeled = ConnectivityGraph(g.weights[np.ix_(p, p)])
        a = spectrum_features(spectrum_of(g))
        b = spectrum_features(spectrum_of(relabeled))
        assert np.allclose(a, b, atol=1e-12)


class TestDispatch:
    def test_known_kernels(self, rng):
        graphs = [random_connectome(rng, 8, density=0.5) for _ in range(4)]
        for kernel in ("emd", "linear-spectra", "linear-edges"):
            gram = gram_for_kernel(graphs, kernel)
            assert gram.n == 4

    def test_unknown_kernel(self, rng):
        with pytest.raises(ValueError, match="unknown kernel"):
            gram_for_kernel([random_connectome(rng, 5)], "rbf")
