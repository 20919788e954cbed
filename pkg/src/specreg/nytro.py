"""NYTRO: gradient descent on the empirical risk restricted to the Nystrom
subspace, with the iteration count as the regularization parameter.

With B = K_nm R (R the change of variable with R R^T = K_mm^+), the iterate

    beta_t = beta_{t-1} - (gamma / n) B^T (B beta_{t-1} - Y),  beta_0 = 0

is plain gradient descent on ||B beta - Y||^2; the returned coefficients are
alpha = R beta.  When a validation split is supplied the iteration is run on
the remaining rows and the returned model is the iterate picked by the
relative-improvement stopping rule on the validation error curve.

For t >= 2 the expected excess risk of the iterate is within a factor
c_t = 4 (1 + 1/(t-1))^2 <= 16 of the subsampled Tikhonov solution at
lambda = 1/(gamma t); the factor bounds a population quantity and is not
asserted here.
"""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .nystrom import NystromModel, _change_of_variable


@dataclass
class NytroState:
    beta: np.ndarray
    t: int
    gamma: float
    r: np.ndarray = field(repr=False)


@dataclass
class NytroResult:
    model: NystromModel
    chosen_t: int
    val_errors: np.ndarray | None
    objectives: np.ndarray
    gamma: float
    cumulative_times: np.ndarray | None = None


def _spectral_norm_sq(b, iters=50, seed=7):
    """Power-iteration estimate of ||B||^2."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(b.shape[1])
    nrm = np.linalg.norm(v)
    if nrm == 0 or b.size == 0:
        return 0.0
    v /= nrm
    est = 0.0
    for _ in range(iters):
        w = b.T @ (b @ v)
        est = np.linalg.norm(w)
        if est == 0:
            return 0.0
        v = w / est
    return float(est)


def early_stop_rule(validation_errors, rel_threshold=0.05):
    """Smallest 1-based t after which no later error beats error(t) by more
    than rel_threshold * error(t); the last index when errors keep improving."""
    errs = np.asarray(validation_errors, dtype=float)
    if errs.size == 0:
        raise ParameterError("empty error sequence")
    for t in range(errs.size):
        later = errs[t + 1 :]
        if later.size == 0 or not np.any(errs[t] - later > rel_threshold * errs[t]):
            return t + 1
    return errs.size


def nytro_fit(
    knm,
    kmm,
    y,
    gamma,
    t_max,
    val_rows=None,
    rel_threshold=0.05,
    kernel=None,
    centers=None,
):
    """Run the NYTRO iteration and return the early-stopped model.

    ``val_rows`` indexes rows of (knm, y) held out from the descent and used
    for the stopping rule; without it the full data drive the descent and the
    final iterate is returned.
    """
    if t_max < 1:
        raise ParameterError("t_max must be >= 1")
    knm = np.asarray(knm, dtype=float)
    y = np.asarray(y, dtype=float)
    y2 = y[:, None] if y.ndim == 1 else y
    n_total = knm.shape[0]
    r = _change_of_variable(kmm)

    if val_rows is not None:
        val_rows = np.asarray(val_rows, dtype=int)
        mask = np.ones(n_total, dtype=bool)
        mask[val_rows] = False
        fit_rows = np.where(mask)[0]
    else:
        fit_rows = np.arange(n_total)
    b = knm[fit_rows] @ r
    y_fit = y2[fit_rows]
    n = fit_rows.size

    norm_sq = _spectral_norm_sq(b)
    if norm_sq > 0 and gamma * norm_sq / n >= 1.0:
        warnings.warn(
            f"step size gamma={gamma:g} exceeds the descent bound "
            f"n/||K_nm R||^2 = {n / norm_sq:g}; the objective may not decrease",
            stacklevel=2,
        )

    if val_rows is not None:
        b_val = knm[val_rows] @ r
        y_val = y2[val_rows]

    k = b.shape[1]
    state = NytroState(beta=np.zeros((k, y2.shape[1])), t=0, gamma=float(gamma), r=r)
    betas = np.empty((t_max, k, y2.shape[1]))
    objectives = np.empty(t_max)
    times = np.empty(t_max)
    val_errors = np.empty(t_max) if val_rows is not None else None
    start = time.perf_counter()
    for i in range(t_max):
        resid = b @ state.beta - y_fit
        state.beta = state.beta - (gamma / n) * (b.T @ resid)
        state.t = i + 1
        betas[i] = state.beta
        objectives[i] = np.sum((b @ state.beta - y_fit) ** 2)
        if val_rows is not None:
            val_errors[i] = np.sqrt(
                np.mean((b_val @ state.beta - y_val) ** 2)
            )
        times[i] = time.perf_counter() - start

    chosen = early_stop_rule(val_errors, rel_threshold) if val_rows is not None else t_max
    alpha = r @ betas[chosen - 1]
    model = NystromModel(
        alpha_tilde=alpha[:, 0] if y.ndim == 1 else alpha,
        centers=None if centers is None else np.asarray(centers, float),
        kernel=kernel,
        lam=0.0,
    )
    return NytroResult(
        model=model,
        chosen_t=chosen,
        val_errors=val_errors,
        objectives=objectives,
        gamma=float(gamma),
        cumulative_times=times,
    )
