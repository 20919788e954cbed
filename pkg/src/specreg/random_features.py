"""Random Fourier features for the Gaussian kernel and ridge regression on them.

A feature map of size D draws frequencies omega_j ~ N(0, I / sigma^2) and
phases b_j ~ U[0, 2 pi); the map

    z(x) = sqrt(2 / D) * cos(omega x + b)

satisfies E[z(x)^T z(x')] = exp(-||x - x'||^2 / (2 sigma^2)) exactly, so the
inner product is an unbiased kernel estimate.  The incremental solver grows
the ridge normal equations one feature at a time, reusing the bordered
Cholesky machinery of the Nystrom path (the border matrix here is
[[0, c], [c^T, gamma]] with gamma = a^T a + lambda n and c = A^T a).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError
from .exact import PrimalModel, rls_fit_primal
from .linalg import (
    CholFactor,
    _border_step_kernel,
    chol_solve,
    cholesky,
    cholup_inplace,
)


@dataclass(frozen=True)
class FeatureMap:
    omegas: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)
    bandwidth: float
    seed: int

    @property
    def n_features(self):
        return self.omegas.shape[0]

    @property
    def scale(self):
        return np.sqrt(2.0 / self.n_features)

    def to_dict(self):
        # frequencies are regenerated from the seed on load
        return {
            "d": int(self.omegas.shape[1]),
            "n_features": int(self.n_features),
            "bandwidth": float(self.bandwidth),
            "seed": int(self.seed),
        }

    @staticmethod
    def from_dict(d):
        return sample_features(d["d"], d["n_features"], d["bandwidth"], d["seed"])


def sample_features(d, n_features, sigma, seed=0):
    if n_features < 1:
        raise ParameterError("n_features must be >= 1")
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    rng = np.random.default_rng(seed)
    omegas = rng.standard_normal((n_features, d)) / sigma
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_features)
    return FeatureMap(omegas=omegas, phases=phases, bandwidth=float(sigma), seed=seed)


def transform(fm, x):
    """Mapped features, one row per sample: sqrt(2/D) cos(omega x + b)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != fm.omegas.shape[1]:
        raise ShapeError(
            f"inputs have dimension {x.shape[1]}, map expects {fm.omegas.shape[1]}"
        )
    return fm.scale * np.cos(x @ fm.omegas.T + fm.phases)


def rf_fit(xt, y, lam):
    """Ridge on mapped features: (Xt^T Xt + n lam I) W = Xt^T Y."""
    return rls_fit_primal(xt, y, lam)


@dataclass
class RfPath:
    models: list
    steps: list
    cumulative_times: list
    fallbacks: list


def sqrt3_append(r, c, gamma):
    """Bordered factor update with the two-plus-update constants
    u = (2c/g, sqrt(3 gamma / 4)), v = (-2c/g, sqrt(gamma / 4)), g = (sqrt(3) - 1) gamma.

    Kept only as a validation target: u u^T + v v^T has a nonzero top-left
    block 8 c c^T / g^2, so the scheme cannot reproduce the bordered Gram
    matrix exactly (see the accompanying tests), and the path below uses the
    exact rank-one pair instead.
    """
    t = r.dim + 1
    out = np.zeros((t, t))
    out[: t - 1, : t - 1] = r.r
    g = (np.sqrt(3.0) - 1.0) * gamma
    u = np.append(2.0 * c / g, np.sqrt(3.0 * gamma / 4.0))
    v = np.append(-2.0 * c / g, np.sqrt(gamma / 4.0))
    cholup_inplace(out, u, "plus")
    cholup_inplace(out, v, "plus")
    return CholFactor(r=out)


def rf_incremental_path(x, y, fm, lam, eval_steps=None, residual_tol=1e-5):
    """Ridge solutions for every feature count m = 1..D in one sweep.

    The model at m matches a batch rf_fit on the first m columns of the
    mapped data.  Each step appends one feature column to the normal
    equations through the exact bordered update; if the grown factor fails a
    residual check against the true Gram column the step falls back to a
    full refactorization (recorded in the result).
    """
    if lam <= 0:
        raise ParameterError("lam must be positive")
    xt = transform(fm, x)
    y = np.asarray(y, dtype=float)
    y2 = y[:, None] if y.ndim == 1 else y
    n, m_max = xt.shape
    if eval_steps is None:
        eval_steps = range(1, m_max + 1)
    eval_set = set(int(t) for t in eval_steps)
    if eval_set and (min(eval_set) < 1 or max(eval_set) > m_max):
        raise ParameterError("eval steps outside 1..m_max")

    start = time.perf_counter()
    rbuf = np.zeros((m_max, m_max))
    aty = xt.T @ y2
    models, steps, times, fallbacks = [], [], [], []
    for t in range(1, m_max + 1):
        a_t = xt[:, t - 1]
        gamma = a_t @ a_t + lam * n
        if t == 1:
            rbuf[0, 0] = np.sqrt(gamma)
        else:
            c_t = xt[:, : t - 1].T @ a_t
            bad = _border_step_kernel(rbuf, t, c_t, gamma)
            view = rbuf[:t, :t]
            # last-column residual against the true normal equations
            new_col = view[:, t - 1] @ view
            true_col = np.append(c_t, gamma)
            scale = max(np.linalg.norm(true_col), 1.0)
            if bad >= 0 or np.linalg.norm(new_col - true_col) > residual_tol * scale:
                g_t = xt[:, :t].T @ xt[:, :t] + lam * n * np.eye(t)
                view[:, :] = cholesky(g_t).r
                fallbacks.append(t)
        if t in eval_set:
            fac = CholFactor(r=np.ascontiguousarray(rbuf[:t, :t]))
            w = chol_solve(fac, aty[:t])
            models.append(PrimalModel(weights=w[:, 0] if y.ndim == 1 else w))
            steps.append(t)
            times.append(time.perf_counter() - start)
    return RfPath(models=models, steps=steps, cumulative_times=times, fallbacks=fallbacks)
