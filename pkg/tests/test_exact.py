import numpy as np
import pytest

from specreg.errors import ParameterError, UntrainedError
from specreg.exact import (
    kols_fit,
    krls_fit,
    predict_dual,
    predict_primal,
    rls_fit_primal,
)
from specreg.filters import apply_filter, tikhonov
from specreg.kernels import gaussian_kernel, gram, linear_kernel
from specreg.linalg import eigh_sym
from specreg.serialize import load_model, save_model


def random_pd_kernel(rng, n, extra=0.3):
    a = rng.standard_normal((n, 2 * n))
    m = a @ a.T / n + extra * np.eye(n)
    return (m + m.T) / 2


class TestRlsPrimal:
    def test_identity_design(self):
        n = 4
        y = np.arange(8.0).reshape(n, 2)
        model = rls_fit_primal(np.eye(n), y, 1.0 / n)  # n lam = 1
        assert np.allclose(model.weights, y / 2)

    def test_zero_targets(self):
        rng = np.random.default_rng(0)
        model = rls_fit_primal(rng.standard_normal((10, 3)), np.zeros((10, 2)), 0.1)
        assert np.allclose(model.weights, 0)

    def test_against_explicit_inverse(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((30, 5))
        y = rng.standard_normal((30, 2))
        lam = 0.05
        model = rls_fit_primal(x, y, lam)
        oracle = np.linalg.inv(x.T @ x + 30 * lam * np.eye(5)) @ (x.T @ y)
        assert np.linalg.norm(model.weights - oracle) < 1e-9 * np.linalg.norm(oracle)

    def test_bad_lambda(self):
        with pytest.raises(ParameterError):
            rls_fit_primal(np.eye(2), np.ones(2), 0.0)


class TestKrls:
    def test_identity_kernel(self):
        n = 3
        y = np.arange(3.0)
        model = krls_fit(np.eye(n), y, 1.0 / n)
        assert np.allclose(model.alpha, y / 2)

    def test_representer_identity_vs_primal(self):
        # linear-kernel dual predictions match primal RLS predictions
        rng = np.random.default_rng(2)
        x = rng.standard_normal((25, 4))
        y = rng.standard_normal((25, 2))
        lam = 0.07
        primal = rls_fit_primal(x, y, lam)
        dual = krls_fit(
            gram(linear_kernel(), x), y, lam, kernel=linear_kernel(), train_inputs=x
        )
        probe = rng.standard_normal((10, 4))
        p1 = predict_primal(primal, probe)
        p2 = predict_dual(dual, probe)
        assert np.linalg.norm(p1 - p2) < 1e-8 * max(np.linalg.norm(p1), 1)

    def test_matches_tikhonov_filter(self):
        rng = np.random.default_rng(3)
        n = 12
        k = random_pd_kernel(rng, n)
        y = rng.standard_normal((n, 1))
        lam = 0.03
        model = krls_fit(k, y, lam)
        alpha = apply_filter(eigh_sym(k), y, tikhonov(lam))
        assert np.linalg.norm(model.alpha - alpha) < 1e-9 * np.linalg.norm(alpha)

    def test_shrinkage_in_lambda(self):
        rng = np.random.default_rng(4)
        n = 15
        k = random_pd_kernel(rng, n)
        y = rng.standard_normal(n)
        norms = [
            np.linalg.norm(krls_fit(k, y, lam).alpha)
            for lam in (1e-4, 1e-2, 1e-1, 1.0)
        ]
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_interpolation_limit(self):
        rng = np.random.default_rng(5)
        n = 10
        k = random_pd_kernel(rng, n, extra=1.0)
        y = rng.standard_normal(n)
        alpha_krls = krls_fit(k, y, 1e-12).alpha
        alpha_kols = kols_fit(k, y).alpha
        assert np.linalg.norm(k @ alpha_krls - k @ alpha_kols) < 1e-6


class TestKols:
    def test_full_rank_inverse(self):
        rng = np.random.default_rng(6)
        k = random_pd_kernel(rng, 6, extra=1.0)
        y = rng.standard_normal((6, 2))
        model = kols_fit(k, y)
        assert np.allclose(model.alpha, np.linalg.solve(k, y), atol=1e-8)

    def test_zero_kernel(self):
        model = kols_fit(np.zeros((4, 4)), np.ones((4, 1)))
        assert np.allclose(model.alpha, 0)

    def test_rank_deficient_projection(self):
        # K alpha is the eigenprojection of Y onto range(K)
        rng = np.random.default_rng(7)
        b = rng.standard_normal((8, 3))
        k = b @ b.T  # rank 3
        y = rng.standard_normal((8, 1))
        model = kols_fit(k, y)
        eig = eigh_sym(k)
        live = eig.eigvals > 1e-12 * eig.eigvals[0]
        q = eig.eigvecs[:, live]
        projection = q @ (q.T @ y)
        assert np.linalg.norm(k @ model.alpha - projection) < 1e-8


class TestPredictDual:
    def test_interpolates_training_data(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((9, 2))
        y = rng.standard_normal((9, 1))
        spec = gaussian_kernel(1.0)
        k = gram(spec, x)
        model = kols_fit(k, y, kernel=spec, train_inputs=x)
        assert np.linalg.norm(predict_dual(model, x) - y) < 1e-6

    def test_zero_alpha(self):
        x = np.zeros((3, 2))
        model = kols_fit(np.zeros((3, 3)), np.zeros((3, 1)),
                         kernel=gaussian_kernel(1.0), train_inputs=x)
        assert np.allclose(predict_dual(model, np.ones((2, 2))), 0)

    def test_single_point_matches_loop(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((6, 3))
        y = rng.standard_normal(6)
        spec = gaussian_kernel(0.8)
        model = krls_fit(gram(spec, x), y, 0.01, kernel=spec, train_inputs=x)
        probe = rng.standard_normal(3)
        from specreg.kernels import kernel_eval

        naive = sum(
            kernel_eval(spec, x[i], probe) * model.alpha[i] for i in range(6)
        )
        pred = predict_dual(model, probe[None, :])
        assert pred[0] == pytest.approx(naive, rel=1e-12)

    def test_untrained_error(self):
        model = krls_fit(np.eye(2), np.ones(2), 0.1)
        with pytest.raises(UntrainedError):
            predict_dual(model, np.ones((1, 2)))


class TestSerialization:
    def test_dual_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((5, 2))
        spec = gaussian_kernel(0.9)
        model = krls_fit(gram(spec, x), rng.standard_normal(5), 0.1,
                         kernel=spec, train_inputs=x)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded, fm = load_model(path)
        assert fm is None
        assert np.allclose(loaded.alpha, model.alpha)
        assert loaded.kernel == model.kernel
        probe = rng.standard_normal((3, 2))
        assert np.allclose(predict_dual(loaded, probe), predict_dual(model, probe))

    def test_primal_roundtrip(self, tmp_path):
        model = rls_fit_primal(np.eye(3), np.arange(3.0), 0.5)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded, _ = load_model(path)
        assert np.allclose(loaded.weights, model.weights)
