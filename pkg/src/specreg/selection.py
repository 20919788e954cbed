"""Model selection and capacity diagnostics.

Hold-out and V-fold cross-validation over explicit hyperparameter grids,
effective-dimension measures of a kernel matrix, and the joint (lambda, m)
validation surface computed with one incremental Nystrom path per lambda.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import time

import numpy as np

from .data import indicator
from .errors import ParameterError
from .linalg import eigh_sym
from .nystrom import incremental_path, leverage_scores, predict_nystrom


def effective_dimension(k_mat, lam):
    """d_eff(lambda) = Tr(K (K + lambda n I)^{-1}) = sum_i sigma_i/(sigma_i + lambda n)."""
    if lam <= 0:
        raise ParameterError("lam must be positive")
    eig = eigh_sym(k_mat)
    return float(np.sum(eig.eigvals / (eig.eigvals + lam * eig.dim)))


def max_leverage_dimension(k_mat, lam):
    """n times the largest leverage score at regularization lambda."""
    if lam <= 0:
        raise ParameterError("lam must be positive")
    scores = leverage_scores(k_mat, lam).scores
    return float(scores.size * scores.max())


def _metric(task):
    if task == "classification":
        return lambda pred, truth: float(np.mean(pred != truth))
    return lambda pred, truth: float(
        np.sqrt(np.mean((np.asarray(pred) - np.asarray(truth)) ** 2))
    )


def _complexity_key(hyper):
    # Ties prefer the most regularized model: largest lam, then fewest
    # centers/features, then fewest iterations.
    return (-hyper.get("lam", -np.inf), hyper.get("m", 0), hyper.get("t", 0))


@dataclass
class CVResult:
    best: dict
    errors: np.ndarray
    grid: list
    train_idx: np.ndarray | None = field(default=None, repr=False)
    val_idx: np.ndarray | None = field(default=None, repr=False)


def _pick_best(grid, errors):
    order = sorted(range(len(grid)), key=lambda i: (errors[i], _complexity_key(grid[i])))
    return grid[order[0]]


def holdout_cv(trainer, grid, data, split_fraction=0.2, seed=0):
    """Hold-out validation over a hyperparameter grid.

    ``trainer(hyper, x_train, y_train, task)`` must return a prediction
    callable; predictions are labels for classification data, raw values
    otherwise.  Returns the winning entry (ties break toward the most
    regularized model) and the full error table.
    """
    if not grid:
        raise ParameterError("empty hyperparameter grid")
    if not 0.0 < split_fraction < 1.0:
        raise ParameterError("split_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(data.n)
    n_val = max(1, int(round(split_fraction * data.n)))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    metric = _metric(data.task)
    errors = np.empty(len(grid))
    for i, hyper in enumerate(grid):
        predict = trainer(hyper, data.x[train_idx], _targets(data, train_idx), data.task)
        errors[i] = metric(predict(data.x[val_idx]), _eval_truth(data, val_idx))
    return CVResult(
        best=_pick_best(grid, errors),
        errors=errors,
        grid=list(grid),
        train_idx=train_idx,
        val_idx=val_idx,
    )


def vfold_cv(trainer, grid, data, v, seed=0):
    """V-fold cross-validation; V = n is leave-one-out."""
    if not grid:
        raise ParameterError("empty hyperparameter grid")
    if not 2 <= v <= data.n:
        raise ParameterError(f"need 2 <= V <= n, got V={v}, n={data.n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(data.n)
    folds = np.array_split(perm, v)
    metric = _metric(data.task)
    errors = np.zeros((len(grid), v))
    for j, fold in enumerate(folds):
        train_idx = np.setdiff1d(perm, fold, assume_unique=True)
        for i, hyper in enumerate(grid):
            predict = trainer(
                hyper, data.x[train_idx], _targets(data, train_idx), data.task
            )
            errors[i, j] = metric(predict(data.x[fold]), _eval_truth(data, fold))
    mean_errors = errors.mean(axis=1)
    return CVResult(best=_pick_best(grid, mean_errors), errors=errors, grid=list(grid))


def _targets(data, idx):
    if data.task == "classification":
        return indicator(data.y[idx], data.n_classes)
    return data.y[idx]


def _eval_truth(data, idx):
    return data.y[idx]


@dataclass
class GridSurface:
    """Validation errors over a (lambda, m) grid plus everything needed to
    recompute any single cell."""

    lambda_grid: np.ndarray
    m_grid: np.ndarray
    errors: np.ndarray
    seed: int
    train_idx: np.ndarray = field(repr=False)
    val_idx: np.ndarray = field(repr=False)
    center_order: np.ndarray = field(repr=False)
    timings: np.ndarray
    task: str

    def to_dict(self):
        return {
            "schema_version": 1,
            "lambda_grid": self.lambda_grid.tolist(),
            "m_grid": self.m_grid.tolist(),
            "errors": self.errors.tolist(),
            "seed": int(self.seed),
            "timings": self.timings.tolist(),
            "task": self.task,
        }


def grid_path_lambda_m(
    data, kernel, lambda_grid, m_grid, seed=0, val_fraction=0.2, jobs=1
):
    """Validation-error surface over (lambda, m).

    One incremental path per lambda supplies every m in the grid; cells are
    independent across lambda and may be computed by ``jobs`` worker threads
    with deterministic output ordering.
    """
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    m_grid = np.asarray(m_grid, dtype=int)
    if lambda_grid.size == 0 or m_grid.size == 0:
        raise ParameterError("lambda and m grids must be nonempty")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(data.n)
    n_val = max(1, int(round(val_fraction * data.n)))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    if m_grid.max() > train_idx.size:
        raise ParameterError("largest m exceeds the training split size")
    local_order = rng.permutation(train_idx.size)[: m_grid.max()]
    center_order = train_idx[local_order]
    x_train = data.x[train_idx]
    y_train = _targets(data, train_idx)
    x_val = data.x[val_idx]
    truth = _eval_truth(data, val_idx)
    metric = _metric(data.task)

    def run_one(lam):
        t0 = time.perf_counter()
        path = incremental_path(
            x_train, y_train, local_order, lam, kernel, eval_steps=m_grid.tolist()
        )
        row = np.empty(m_grid.size)
        for j, model in enumerate(path.models):
            scores = predict_nystrom(model, x_val)
            pred = np.argmax(scores, axis=1) + 1 if data.task == "classification" else scores
            row[j] = metric(pred, truth)
        return row, time.perf_counter() - t0

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, lambda_grid))
    else:
        results = [run_one(lam) for lam in lambda_grid]
    errors = np.vstack([r[0] for r in results])
    timings = np.array([r[1] for r in results])
    return GridSurface(
        lambda_grid=lambda_grid,
        m_grid=m_grid,
        errors=errors,
        seed=seed,
        train_idx=train_idx,
        val_idx=val_idx,
        center_order=center_order,
        timings=timings,
        task=data.task,
    )
