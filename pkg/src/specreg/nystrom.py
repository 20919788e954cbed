"""Nystrom-subsampled kernel regularized least squares.

Centers are m training points picked uniformly without replacement or by
approximate-leverage-score sampling with replacement.  The batch solver uses
the pseudo-inverse change of variable through an economic QR of K_mm; the
incremental solver grows the Cholesky factor of

    G_t = K_nt^T K_nt + lambda n K_tt

one center at a time with two rank-one updates per step, so the whole
regularization path in m costs O(n m^2 + m^3) instead of a fresh solve per
subsampling level.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateError, ParameterError, ShapeError
from .kernels import KernelSpec, cross_gram
from .linalg import (
    CholFactor,
    _border_step_kernel,
    chol_solve,
    cholesky,
    economic_qr,
    eigh_sym,
)


@dataclass(frozen=True)
class NystromModel:
    alpha_tilde: np.ndarray
    centers: np.ndarray | None = field(default=None, repr=False)
    kernel: KernelSpec | None = None
    lam: float = 0.0


@dataclass(frozen=True)
class LeverageScores:
    scores: np.ndarray
    t: float


@dataclass
class NystromPath:
    """Models emitted along the incremental path.

    ``steps[i]`` is the center count of ``models[i]``; ``cumulative_times``
    are seconds since the path started; ``fallbacks`` lists the steps where
    the rank-one updates lost positive definiteness and the factor was
    rebuilt from scratch.
    """

    models: list
    steps: list
    cumulative_times: list
    fallbacks: list


def sample_uniform(n, m, seed=0):
    """m distinct center indices drawn uniformly from range(n)."""
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    return rng.choice(n, size=m, replace=False)


def leverage_scores(k_mat, t):
    """Exact diagonal of K (K + t n I)^{-1}."""
    if t <= 0:
        raise ParameterError("t must be positive")
    eig = eigh_sym(k_mat)
    n = eig.dim
    weights = eig.eigvals / (eig.eigvals + t * n)
    scores = (eig.eigvecs**2) @ weights
    return LeverageScores(scores=scores, t=float(t))


def sample_als(scores, m, seed=0):
    """m center indices drawn i.i.d. from the normalized leverage scores."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    s = np.asarray(scores.scores, dtype=float)
    total = s.sum()
    if total <= 0:
        raise DegenerateError("leverage scores are all zero")
    rng = np.random.default_rng(seed)
    return rng.choice(s.size, size=m, replace=True, p=s / total)


def perturb_scores(scores, t_factor, seed=0):
    """Test harness for approximate leverage scores: multiply each exact
    score by an independent factor in [1/T, T], which keeps them T-approximate
    by construction.  No estimation algorithm is provided; this only exercises
    downstream sampling under the approximation contract."""
    if t_factor < 1.0:
        raise ParameterError("T must be >= 1")
    rng = np.random.default_rng(seed)
    factors = np.exp(rng.uniform(-np.log(t_factor), np.log(t_factor), scores.scores.size))
    return LeverageScores(scores=scores.scores * factors, t=scores.t)


def _change_of_variable(kmm):
    """R with R R^T = K_mm^+, via economic QR and a small Cholesky.

    K_mm = S D with orthonormal S; T is the Cholesky factor of S^T K_mm S;
    then R = S T^{-1}.
    """
    s, _d, k = economic_qr(kmm)
    if k == 0:
        raise DegenerateError("center kernel matrix has numerical rank 0")
    t_fac = cholesky(s.T @ kmm @ s)
    return scipy.linalg.solve_triangular(t_fac.r, s.T, trans="T", lower=False).T


def nkrls_fit(knm, kmm, y, lam, *, kernel=None, centers=None):
    """Batch Nystrom KRLS solve.

    Computes alpha = R (A^T A + lambda n I)^{-1} A^T Y with A = K_nm R, which
    equals the pseudo-inverse solution (K_nm^T K_nm + lambda n K_mm)^+ K_nm^T Y
    in prediction.
    """
    if lam <= 0:
        raise ParameterError("lam must be positive")
    knm = np.asarray(knm, dtype=float)
    kmm = np.asarray(kmm, dtype=float)
    y = np.asarray(y, dtype=float)
    y2 = y[:, None] if y.ndim == 1 else y
    n, m = knm.shape
    if kmm.shape != (m, m):
        raise ShapeError(f"K_mm has shape {kmm.shape}, expected ({m}, {m})")
    if y2.shape[0] != n:
        raise ShapeError("K_nm and Y row counts differ")
    r = _change_of_variable(kmm)
    a = knm @ r
    k = a.shape[1]
    g = a.T @ a + lam * n * np.eye(k)
    coef = chol_solve(cholesky(g), a.T @ y2)
    alpha = r @ coef
    return NystromModel(
        alpha_tilde=alpha[:, 0] if y.ndim == 1 else alpha,
        centers=None if centers is None else np.asarray(centers, float),
        kernel=kernel,
        lam=float(lam),
    )


def predict_nystrom(model, xnew):
    if model.centers is None or model.kernel is None:
        raise DegenerateError("model carries no centers or kernel")
    xnew = np.atleast_2d(np.asarray(xnew, dtype=float))
    return cross_gram(model.kernel, xnew, model.centers) @ model.alpha_tilde


def fit_nkrls(x, y, kernel, center_indices, lam):
    """Assemble the kernel blocks for the given centers and solve."""
    x = np.asarray(x, dtype=float)
    centers = x[np.asarray(center_indices, dtype=int)]
    knm = cross_gram(kernel, x, centers)
    kmm = cross_gram(kernel, centers, centers)
    kmm = (kmm + kmm.T) / 2.0
    return nkrls_fit(knm, kmm, y, lam, kernel=kernel, centers=centers)


def incremental_path(x, y, center_order, lam, kernel, eval_steps=None):
    """Solutions for every center count t = 1..m_max in one sweep.

    ``center_order`` indexes rows of ``x``; the kernel blocks needed at step
    t reuse the columns already computed, and the factor of G_t is grown with
    the border vectors

        gamma_t = a_t^T a_t + lambda n K(c_t, c_t)
        c_t     = A_{t-1}^T a_t + lambda n b_t

    through one rank-one update and one downdate.  A downdate that loses
    positive definiteness triggers a full refactorization at that step,
    recorded in the result.  ``eval_steps`` restricts which center counts get
    coefficients (and models); the factor is still updated at every step.
    """
    if lam <= 0:
        raise ParameterError("lam must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    y2 = y[:, None] if y.ndim == 1 else y
    n = x.shape[0]
    order = np.asarray(center_order, dtype=int)
    m_max = order.size
    if m_max < 1:
        raise ParameterError("center order is empty")
    if np.any(order < 0) or np.any(order >= n):
        raise ParameterError("center indices out of range")
    if eval_steps is None:
        eval_steps = range(1, m_max + 1)
    eval_set = set(int(t) for t in eval_steps)
    if eval_set and (min(eval_set) < 1 or max(eval_set) > m_max):
        raise ParameterError("eval steps outside 1..m_max")

    start = time.perf_counter()
    centers = x[order]
    # all kernel columns up front; the incremental work is in the factor
    a_buf = np.ascontiguousarray(cross_gram(kernel, x, centers))
    aty = a_buf.T @ y2
    rbuf = np.zeros((m_max, m_max))
    models, steps, times, fallbacks = [], [], [], []

    for t in range(1, m_max + 1):
        a_t = a_buf[:, t - 1]
        # kernel values against the centers are rows of the column itself
        k_tt = a_t[order[t - 1]]
        gamma = a_t @ a_t + lam * n * k_tt
        if t == 1:
            if gamma <= 0:
                raise DegenerateError("leading Gram entry is not positive")
            rbuf[0, 0] = np.sqrt(gamma)
        else:
            b_t = a_t[order[: t - 1]]
            c_t = a_buf[:, : t - 1].T @ a_t + lam * n * b_t
            bad = _border_step_kernel(rbuf, t, c_t, gamma)
            if bad >= 0:
                kmm_t = a_buf[order[:t], :t]
                g_t = a_buf[:, :t].T @ a_buf[:, :t] + lam * n * (kmm_t + kmm_t.T) / 2.0
                rbuf[:t, :t] = cholesky(g_t).r
                fallbacks.append(t)
        if t in eval_set:
            fac = CholFactor(r=np.ascontiguousarray(rbuf[:t, :t]))
            alpha = chol_solve(fac, aty[:t])
            models.append(
                NystromModel(
                    alpha_tilde=alpha[:, 0] if y.ndim == 1 else alpha,
                    centers=centers[:t],
                    kernel=kernel,
                    lam=float(lam),
                )
            )
            steps.append(t)
            times.append(time.perf_counter() - start)

    return NystromPath(
        models=models, steps=steps, cumulative_times=times, fallbacks=fallbacks
    )
