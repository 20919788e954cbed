"""Recursive regularized least squares classifier with class recoding.

The state keeps the Cholesky factor of A_k = X_k^T X_k + lambda I_d, the
accumulator b_k = X_k^T Y_k, and per-class counts.  Each example costs
O(T d^2) regardless of how many have been seen: a rank-one factor update, a
column bump of b, and two triangular solves for

    W_k = A_k^{-1} b_k Gamma_k^alpha,   Gamma_k = k * diag(counts)^{-1}.

Gamma^alpha rescales each class column by its inverse empirical frequency,
which counteracts class imbalance; alpha in [0, 1] interpolates between the
plain classifier (alpha = 0) and full recoding (alpha = 1).  New classes are
appended on the fly: label T+1 extends counts and b by one column before the
ordinary update runs, so every existing class has a positive count.

Long streams are guarded by a periodic drift check (every 512 updates) that
refactors A_k from an explicitly accumulated Gram matrix if the factor has
drifted.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonContiguousLabelError,
    ParameterError,
    SelectionError,
    UntrainedError,
)
from .exact import PrimalModel
from .linalg import CholFactor, chol_solve, cholesky, cholup_inplace

DRIFT_PERIOD = 512
DRIFT_TOL = 1e-9


@dataclass
class RlscState:
    r: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    counts: np.ndarray
    k: int
    lam: float
    alpha_exp: float
    gram: np.ndarray = field(repr=False)
    weights: np.ndarray = field(default=None, repr=False)
    refactor_events: int = 0

    @property
    def n_classes(self):
        return self.counts.size

    @property
    def dim(self):
        return self.r.shape[0]


def rlsc_init(d, lam, alpha_exp=0.0):
    if lam <= 0:
        raise ParameterError("lam must be positive")
    if not 0.0 <= alpha_exp <= 1.0:
        raise ParameterError("alpha_exp must lie in [0, 1]")
    return RlscState(
        r=np.sqrt(lam) * np.eye(d),
        b=np.zeros((d, 0)),
        counts=np.zeros(0, dtype=int),
        k=0,
        lam=float(lam),
        alpha_exp=float(alpha_exp),
        gram=lam * np.eye(d),
        weights=np.zeros((d, 0)),
    )


def _recompute_weights(state):
    if state.n_classes == 0:
        state.weights = np.zeros((state.dim, 0))
        return
    gamma = state.k / state.counts.astype(float)
    w = chol_solve(CholFactor(r=state.r), state.b)
    state.weights = w * gamma[None, :] ** state.alpha_exp


def rlsc_update(state, x, y):
    """Consume one (x, label) pair; labels may extend the class set by one."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != state.dim or not np.all(np.isfinite(x)):
        raise ParameterError("input must be a finite vector of the trained dimension")
    y = int(y)
    t = state.n_classes
    if y < 1 or y > t + 1:
        raise NonContiguousLabelError(
            f"label {y} outside 1..{t + 1}; classes extend one at a time"
        )
    if y == t + 1:
        state.counts = np.append(state.counts, 0)
        state.b = np.hstack([state.b, np.zeros((state.dim, 1))])
    state.counts[y - 1] += 1
    state.k += 1
    state.b[:, y - 1] += x
    state.gram += np.outer(x, x)
    cholup_inplace(state.r, x.copy(), "plus")
    if state.k % DRIFT_PERIOD == 0:
        err = np.linalg.norm(state.r.T @ state.r - state.gram) / np.linalg.norm(
            state.gram
        )
        if err > DRIFT_TOL:
            state.r = cholesky(state.gram).r
            state.refactor_events += 1
    _recompute_weights(state)
    return state


def rlsc_set_alpha(state, alpha_exp):
    """Change the recoding exponent and refresh the weights in place."""
    if not 0.0 <= alpha_exp <= 1.0:
        raise ParameterError("alpha_exp must lie in [0, 1]")
    state.alpha_exp = float(alpha_exp)
    _recompute_weights(state)
    return state


def rlsc_predict(state, x):
    """argmax-score class for one input; ties go to the lowest class index."""
    if state.n_classes == 0:
        raise UntrainedError("no classes seen yet")
    x = np.asarray(x, dtype=float).ravel()
    return int(np.argmax(x @ state.weights)) + 1


def rlsc_predict_batch(state, x):
    if state.n_classes == 0:
        raise UntrainedError("no classes seen yet")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return np.argmax(x @ state.weights, axis=1) + 1


def select_alpha(state, x_val, y_val, candidates, min_count=20):
    """Largest candidate recoding exponent that does not hurt validation
    accuracy on the well-represented classes (counts >= min_count)."""
    x_val = np.atleast_2d(np.asarray(x_val, dtype=float))
    y_val = np.asarray(y_val, dtype=int)
    good = np.where(state.counts >= min_count)[0] + 1
    mask = np.isin(y_val, good)
    if not np.any(mask):
        raise SelectionError("no validation examples from well-represented classes")
    xv, yv = x_val[mask], y_val[mask]
    base = chol_solve(CholFactor(r=state.r), state.b)
    gamma = state.k / state.counts.astype(float)

    def accuracy(alpha):
        scores = xv @ (base * gamma[None, :] ** alpha)
        return float(np.mean(np.argmax(scores, axis=1) + 1 == yv))

    acc0 = accuracy(0.0)
    passing = [a for a in candidates if accuracy(float(a)) >= acc0]
    return max(passing) if passing else 0.0


def batch_rebalanced_fit(x, y_indicator, lam, class_weights):
    """Weighted normal equations (X^T S X + lam I)^{-1} X^T S Y with per-class
    sample weights; the rebalancing baseline that has no rank-one update."""
    class_weights = np.asarray(class_weights, dtype=float)
    if np.any(class_weights <= 0):
        raise ParameterError("class weights must be positive")
    x = np.asarray(x, dtype=float)
    y_ind = np.asarray(y_indicator, dtype=float)
    labels = np.argmax(y_ind, axis=1)
    s = class_weights[labels]
    xs = x * s[:, None]
    a = x.T @ xs + lam * np.eye(x.shape[1])
    w = chol_solve(cholesky(a), xs.T @ y_ind)
    return PrimalModel(weights=w)


def rlsc_to_dict(state):
    return {
        "r": state.r.tolist(),
        "b": state.b.tolist(),
        "counts": state.counts.tolist(),
        "k": int(state.k),
        "lam": state.lam,
        "alpha_exp": state.alpha_exp,
        "gram": state.gram.tolist(),
        "refactor_events": int(state.refactor_events),
    }


def rlsc_from_dict(d):
    dim = len(d["r"])
    b = np.array(d["b"], dtype=float)
    if b.size == 0:
        b = np.zeros((dim, 0))
    state = RlscState(
        r=np.array(d["r"], dtype=float),
        b=b,
        counts=np.array(d["counts"], dtype=int),
        k=int(d["k"]),
        lam=float(d["lam"]),
        alpha_exp=float(d["alpha_exp"]),
        gram=np.array(d["gram"], dtype=float),
        refactor_events=int(d.get("refactor_events", 0)),
    )
    _recompute_weights(state)
    return state
