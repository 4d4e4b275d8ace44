import numpy as np
import pytest

from tacbench import numerics
from tacbench.reduce import (
    fit_ica,
    fit_pca,
    inverse_transform_pca,
    transform_ica,
    transform_pca,
)


class TestPca:
    def test_rank_one_data(self):
        rng = np.random.default_rng(0)
        direction = np.array([3.0, 4.0]) / 5.0
        x = rng.standard_normal(50)[:, None] * direction[None, :]
        model = fit_pca(x, k=2)
        assert abs(model.components[0] @ direction) == pytest.approx(1.0, abs=1e-10)
        assert model.explained_variance[1] == pytest.approx(0.0, abs=1e-20)

    def test_explained_variance_matches_covariance_eigenvalues(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((200, 6)) @ rng.standard_normal((6, 6))
        model = fit_pca(x, k=5)
        cov = np.cov(x, rowvar=False, ddof=1)
        eig = numerics.symmetric_eigen(cov)
        np.testing.assert_allclose(model.explained_variance, eig.values[:5],
                                   atol=1e-8)

    def test_components_orthonormal(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((100, 8))
        model = fit_pca(x, k=5)
        gram = model.components @ model.components.T
        np.testing.assert_allclose(gram, np.eye(5), atol=1e-10)

    def test_variances_descending(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((150, 10)) * np.arange(1, 11)
        model = fit_pca(x, k=5)
        assert np.all(np.diff(model.explained_variance) <= 1e-12)

    def test_full_rank_reconstruction(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((60, 5))
        model = fit_pca(x, k=5)
        z = transform_pca(model, x)
        np.testing.assert_allclose(inverse_transform_pca(model, z), x, atol=1e-9)

    def test_projection_is_best_low_rank_fit(self):
        # reconstruction error through the PCA basis must not exceed the
        # error through any other orthonormal basis of the same rank
        rng = np.random.default_rng(5)
        x = rng.standard_normal((80, 6)) @ np.diag([5, 4, 3, 1, 0.5, 0.2])
        model = fit_pca(x, k=2)
        recon = inverse_transform_pca(model, transform_pca(model, x))
        err_pca = ((x - recon) ** 2).sum()
        for _ in range(10):
            q, _ = np.linalg.qr(rng.standard_normal((6, 2)))
            mean = x.mean(axis=0)
            other = (x - mean) @ q @ q.T + mean
            err_other = ((x - other) ** 2).sum()
            assert err_pca <= err_other + 1e-8

    def test_transform_centers_with_training_mean(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((40, 4)) + 7.0
        model = fit_pca(x, k=2)
        z = transform_pca(model, x)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-10)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            fit_pca(np.zeros((3, 8)), k=5)
        with pytest.raises(ValueError):
            fit_pca(np.zeros((8, 3)), k=5)
        model = fit_pca(np.random.default_rng(7).standard_normal((20, 6)), k=2)
        with pytest.raises(ValueError):
            transform_pca(model, np.zeros((4, 5)))

    def test_deterministic(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((50, 6))
        a = fit_pca(x, k=3)
        b = fit_pca(x.copy(), k=3)
        np.testing.assert_array_equal(a.components, b.components)


def _mixed_sources(n, seed):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 8, n)
    sources = np.column_stack([
        np.sin(2.0 * t),
        np.sign(np.sin(3.1 * t)),
        rng.uniform(-1.0, 1.0, size=n),
    ])
    mixing = np.array([[1.0, 1.0, 1.0],
                       [0.5, 2.0, 1.0],
                       [1.5, 1.0, 2.0]])
    return sources, sources @ mixing.T


class TestIca:
    def test_recovers_independent_sources(self):
        sources, x = _mixed_sources(2000, seed=0)
        model = fit_ica(x, k=3, seed=0)
        z = transform_ica(model, x)
        corr = np.corrcoef(z.T, sources.T)[:3, 3:]
        # each source matches exactly one estimated component
        best = np.max(np.abs(corr), axis=0)
        assert np.all(best >= 0.95)
        assert model.converged

    def test_estimates_decorrelated_unit_variance(self):
        _, x = _mixed_sources(3000, seed=1)
        model = fit_ica(x, k=3, seed=0)
        z = transform_ica(model, x)
        cov = (z.T @ z) / z.shape[0]
        np.testing.assert_allclose(cov, np.eye(3), atol=1e-6)

    def test_deterministic_for_fixed_seed(self):
        _, x = _mixed_sources(500, seed=2)
        a = fit_ica(x, k=3, seed=5)
        b = fit_ica(x, k=3, seed=5)
        np.testing.assert_array_equal(a.components, b.components)

    def test_components_product_structure(self):
        _, x = _mixed_sources(400, seed=3)
        model = fit_ica(x, k=3, seed=0)
        np.testing.assert_allclose(model.components,
                                   model.unmixing @ model.whitening, atol=1e-12)

    def test_unmixing_orthonormal(self):
        _, x = _mixed_sources(400, seed=4)
        model = fit_ica(x, k=3, seed=0)
        np.testing.assert_allclose(model.unmixing @ model.unmixing.T,
                                   np.eye(3), atol=1e-8)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            fit_ica(np.zeros((2, 6)), k=3)

    def test_feature_mismatch_on_transform(self):
        _, x = _mixed_sources(300, seed=5)
        model = fit_ica(x, k=2, seed=0)
        with pytest.raises(ValueError):
            transform_ica(model, np.zeros((10, 4)))
