"""Spectral regularization filters on kernel-matrix eigenvalues.

A filter turns the eigendecomposition K = Q diag(sigma) Q^T into a
stabilized approximate inverse Q diag(g(sigma)) Q^T applied to the targets:

* tikhonov     g(sigma) = 1 / (sigma + n lambda)
* tsvd         g(sigma) = 1 / sigma for sigma >= n lambda, else 0
* landweber    g(sigma) = eta * sum_{i<t} (1 - eta sigma)^i

Landweber is also available as the explicit gradient-descent recursion
alpha_i = alpha_{i-1} + eta (Y - K alpha_{i-1}), which reproduces the
truncated Neumann-series filter exactly.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError, SingularFilterError
from .linalg import RANK_RTOL

KINDS = ("tikhonov", "tsvd", "landweber")


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    lam: float | None = None
    eta: float | None = None
    t: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown filter kind {self.kind!r}")
        if self.kind == "tikhonov":
            if self.lam is None or self.lam <= 0:
                raise ParameterError("tikhonov needs lam > 0")
            if self.eta is not None or self.t is not None:
                raise ParameterError("tikhonov takes only lam")
        elif self.kind == "tsvd":
            if self.lam is None or self.lam < 0:
                raise ParameterError("tsvd needs lam >= 0")
            if self.eta is not None or self.t is not None:
                raise ParameterError("tsvd takes only lam")
        else:
            if self.eta is None or self.eta <= 0:
                raise ParameterError("landweber needs eta > 0")
            if self.t is None or int(self.t) < 1:
                raise ParameterError("landweber needs t >= 1")
            if self.lam is not None:
                raise ParameterError("landweber takes eta and t, not lam")


def tikhonov(lam):
    return FilterSpec("tikhonov", lam=lam)


def tsvd(lam):
    return FilterSpec("tsvd", lam=lam)


def landweber(eta, t):
    return FilterSpec("landweber", eta=eta, t=t)


def _landweber_sum(eta, sigma, t):
    # eta * sum_{i=0}^{t-1} (1 - eta sigma)^i, via the geometric closed form.
    sigma = np.asarray(sigma, dtype=float)
    out = np.empty_like(sigma)
    zero = sigma == 0.0
    out[zero] = eta * t
    nz = ~zero
    a = 1.0 - eta * sigma[nz]
    out[nz] = (1.0 - a**t) / sigma[nz]
    return out


def scalar_filter(spec, sigma, n):
    """Filter value for one eigenvalue, given the sample count n."""
    if sigma < 0:
        raise ParameterError("eigenvalue must be nonnegative")
    if n < 1:
        raise ParameterError("sample count must be >= 1")
    if spec.kind == "tikhonov":
        denom = sigma + n * spec.lam
        if denom == 0.0:
            raise SingularFilterError("tikhonov filter singular at sigma = 0")
        return 1.0 / denom
    if spec.kind == "tsvd":
        if sigma >= n * spec.lam and sigma > 0:
            return 1.0 / sigma
        return 0.0
    return float(_landweber_sum(spec.eta, np.array([sigma]), spec.t)[0])


def apply_filter(k, y, spec):
    """Coefficients Q g(Sigma) Q^T y for an eigendecomposition k of K."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] != k.dim:
        raise ShapeError(f"targets have {y.shape[0]} rows, kernel dim {k.dim}")
    sig = k.eigvals
    n = k.dim
    if spec.kind == "tikhonov":
        with np.errstate(divide="ignore"):
            g = 1.0 / (sig + n * spec.lam)
    elif spec.kind == "tsvd":
        top = sig[0] if sig.size else 0.0
        live = (sig >= n * spec.lam) & (sig > RANK_RTOL * top)
        g = np.zeros_like(sig)
        g[live] = 1.0 / sig[live]
    else:
        g = _landweber_sum(spec.eta, sig, spec.t)
    if not np.all(np.isfinite(g)):
        raise SingularFilterError("filter is singular at a zero eigenvalue")
    q = k.eigvecs
    return q @ (g[:, None] * (q.T @ y))


def landweber_iterate(k_mat, y, eta=None, t_max=1):
    """Gradient-descent path alpha_1 .. alpha_{t_max} for the kernel system.

    alpha_0 = 0 and alpha_i = alpha_{i-1} + eta (y - K alpha_{i-1}).  When
    eta is omitted it defaults to 2/n if that respects the convergence bound
    eta < 2/sigma_max, and to 1/sigma_max otherwise.  Returns the stacked
    path with shape (t_max, n, T).
    """
    k_mat = np.asarray(k_mat, dtype=float)
    if k_mat.ndim != 2 or k_mat.shape[0] != k_mat.shape[1]:
        raise ShapeError(f"kernel matrix must be square, got {k_mat.shape}")
    y = np.asarray(y, dtype=float)
    y2 = y[:, None] if y.ndim == 1 else y
    n = k_mat.shape[0]
    sig_max = float(np.linalg.eigvalsh(k_mat)[-1]) if n else 0.0
    if eta is None:
        eta = 2.0 / n if sig_max < n else 1.0 / sig_max
    elif sig_max > 0 and eta >= 2.0 / sig_max:
        warnings.warn(
            f"step size {eta:g} >= 2/sigma_max = {2.0 / sig_max:g}; "
            "the iteration may diverge",
            stacklevel=2,
        )
    path = np.empty((t_max,) + y2.shape)
    alpha = np.zeros_like(y2)
    for i in range(t_max):
        alpha = alpha + eta * (y2 - k_mat @ alpha)
        path[i] = alpha
    return path if y.ndim > 1 else path[:, :, 0]


def condition_number(k, lam, n):
    """(sigma_max + n lam) / (sigma_min + n lam); +inf when both terms vanish."""
    if lam < 0:
        raise ParameterError("lam must be nonnegative")
    hi = k.eigvals[0] + n * lam
    lo = k.eigvals[-1] + n * lam
    if lo == 0.0:
        return np.inf
    return float(hi / lo)
