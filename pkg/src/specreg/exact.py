"""Exact estimators: primal linear RLS, dual KRLS and KOLS, prediction."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError, UntrainedError
from .kernels import KernelSpec, cross_gram
from .linalg import RANK_RTOL, chol_solve, cholesky, eigh_sym


@dataclass(frozen=True)
class PrimalModel:
    """Weight matrix over explicit features, prediction x^T W."""

    weights: np.ndarray


@dataclass(frozen=True)
class DualModel:
    """Coefficients over training points, prediction sum_i K(x_i, x) alpha_i.

    ``train_inputs`` and ``kernel`` are needed for prediction; fitting from a
    precomputed kernel matrix leaves them unset.
    """

    alpha: np.ndarray
    train_inputs: np.ndarray | None = field(default=None, repr=False)
    kernel: KernelSpec | None = None


def _as_2d(y):
    y = np.asarray(y, dtype=float)
    return (y[:, None], True) if y.ndim == 1 else (y, False)


def rls_fit_primal(x, y, lam):
    """Solve (X^T X + n lam I) W = X^T Y."""
    if lam <= 0:
        raise ParameterError("lam must be positive")
    x = np.asarray(x, dtype=float)
    y2, squeeze = _as_2d(y)
    if y2.shape[0] != x.shape[0]:
        raise ShapeError("X and Y row counts differ")
    n, d = x.shape
    a = x.T @ x + n * lam * np.eye(d)
    w = chol_solve(cholesky(a), x.T @ y2)
    return PrimalModel(weights=w[:, 0] if squeeze else w)


def predict_primal(model, xnew):
    xnew = np.atleast_2d(np.asarray(xnew, dtype=float))
    return xnew @ model.weights


def krls_fit(k_mat, y, lam, *, kernel=None, train_inputs=None):
    """Solve (K + n lam I) alpha = Y."""
    if lam <= 0:
        raise ParameterError("lam must be positive")
    k_mat = np.asarray(k_mat, dtype=float)
    y2, squeeze = _as_2d(y)
    n = k_mat.shape[0]
    if y2.shape[0] != n:
        raise ShapeError("K and Y row counts differ")
    alpha = chol_solve(cholesky(k_mat + n * lam * np.eye(n)), y2)
    return DualModel(
        alpha=alpha[:, 0] if squeeze else alpha,
        train_inputs=None if train_inputs is None else np.asarray(train_inputs, float),
        kernel=kernel,
    )


def kols_fit(k_mat, y, *, kernel=None, train_inputs=None):
    """Unregularized pseudo-inverse solution alpha = K^+ Y."""
    k_mat = np.asarray(k_mat, dtype=float)
    y2, squeeze = _as_2d(y)
    if y2.shape[0] != k_mat.shape[0]:
        raise ShapeError("K and Y row counts differ")
    eig = eigh_sym(k_mat)
    sig = eig.eigvals
    top = sig[0] if sig.size else 0.0
    inv = np.where(sig > RANK_RTOL * top, 1.0 / np.where(sig > 0, sig, 1.0), 0.0)
    alpha = eig.eigvecs @ (inv[:, None] * (eig.eigvecs.T @ y2))
    return DualModel(
        alpha=alpha[:, 0] if squeeze else alpha,
        train_inputs=None if train_inputs is None else np.asarray(train_inputs, float),
        kernel=kernel,
    )


def predict_dual(model, xnew):
    """Cross-kernel prediction against the stored training inputs."""
    if model.train_inputs is None or model.kernel is None:
        raise UntrainedError("model carries no training inputs or kernel")
    xnew = np.atleast_2d(np.asarray(xnew, dtype=float))
    return cross_gram(model.kernel, xnew, model.train_inputs) @ model.alpha
