"""Command-line front end: train / predict / cv / path / bench.

Runs are described by a flat key=value config file with dotted section
prefixes (algorithm.*, data.*, grid.*, cv.*, bench.*, predict.*).  Every
command writes a versioned JSON report into --out; tabular results are also
written as CSV and, where there is a curve or surface to look at, rendered
to PNG.  All randomness flows from the single --seed flag.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import plots, reports
from .data import indicator, load_csv, load_libsvm, save_metadata, standardize
from .errors import ConfigError
from .exact import (
    DualModel,
    PrimalModel,
    kols_fit,
    krls_fit,
    predict_dual,
    predict_primal,
    rls_fit_primal,
)
from .filters import FilterSpec, apply_filter, landweber_iterate
from .kernels import KernelSpec, cross_gram, gram
from .linalg import eigh_sym
from .nystrom import NystromModel, fit_nkrls, incremental_path, predict_nystrom, sample_uniform
from .nytro import nytro_fit
from .random_features import rf_fit, rf_incremental_path, sample_features, transform
from .rlsc import (
    RlscState,
    rlsc_init,
    rlsc_predict_batch,
    rlsc_set_alpha,
    rlsc_update,
    select_alpha,
)
from .selection import grid_path_lambda_m, holdout_cv, vfold_cv
from .serialize import load_model, save_model
from .sgm import LossSpec, StepSchedule, schedule_for_regime, sgm_run

ALGORITHMS = (
    "krls",
    "kols",
    "rls",
    "nkrls",
    "nytro",
    "rf",
    "sgm",
    "landweber",
    "tsvd",
    "irlsc",
)

KNOWN_KEYS = {
    "algorithm.name",
    "algorithm.kernel",
    "algorithm.bandwidth",
    "algorithm.degree",
    "algorithm.lambda",
    "algorithm.eta",
    "algorithm.t",
    "algorithm.t_max",
    "algorithm.m",
    "algorithm.gamma",
    "algorithm.n_features",
    "algorithm.loss",
    "algorithm.regime",
    "algorithm.beta",
    "algorithm.eta1",
    "algorithm.theta",
    "algorithm.epochs",
    "algorithm.alpha",
    "algorithm.alpha_candidates",
    "algorithm.min_count",
    "data.train",
    "data.test",
    "data.format",
    "data.target",
    "data.task",
    "data.header",
    "data.standardize",
    "data.validation_fraction",
    "grid.lambda",
    "grid.m",
    "grid.t",
    "grid.t_max",
    "cv.kind",
    "cv.v",
    "cv.fraction",
    "bench.kind",
    "bench.repetitions",
    "predict.model",
}

_REQUIRED = object()


def parse_config(path):
    cfg = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", key="config") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno} is not key = value", key=line)
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KNOWN_KEYS:
                raise ConfigError("unknown config key", key=key)
            cfg[key] = value
    return cfg


def cfg_get(cfg, key, default=_REQUIRED, cast=str):
    if key not in cfg:
        if default is _REQUIRED:
            raise ConfigError("missing required key", key=key)
        return default
    raw = cfg[key]
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError:
        raise ConfigError(f"cannot parse value {raw!r}", key=key) from None


def parse_grid(raw, key):
    """Comma list, or logspace:lo:hi:num / linspace:lo:hi:num."""
    raw = raw.strip()
    try:
        if raw.startswith(("logspace:", "linspace:")):
            kind, lo, hi, num = raw.split(":")
            lo, hi, num = float(lo), float(hi), int(num)
            values = (np.geomspace if kind == "logspace" else np.linspace)(
                lo, hi, num
            ).tolist()
        else:
            values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {raw!r}", key=key) from None
    if not values:
        raise ConfigError("empty grid", key=key)
    return values


def load_dataset(cfg, role, seed=0):
    key = f"data.{role}"
    path = cfg_get(cfg, key)
    fmt = cfg_get(cfg, "data.format", "csv")
    task = cfg_get(cfg, "data.task", "regression")
    try:
        if fmt == "csv":
            target = cfg_get(cfg, "data.target", "last")
            if target != "last":
                target = [int(v) for v in target.split(",")]
            ds = load_csv(
                path,
                target_columns=target,
                has_header=cfg_get(cfg, "data.header", False, bool),
                task=task,
            )
        elif fmt == "libsvm":
            ds = load_libsvm(path, task=task)
        else:
            raise ConfigError(f"unknown data format {fmt!r}", key="data.format")
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}", key=key) from None
    if cfg_get(cfg, "data.standardize", False, bool):
        ds, _mean, _std = standardize(ds)
    return ds


def kernel_from_config(cfg):
    family = cfg_get(cfg, "algorithm.kernel", "gaussian")
    if family == "gaussian":
        return KernelSpec(
            "gaussian", bandwidth=cfg_get(cfg, "algorithm.bandwidth", 1.0, float)
        )
    if family == "polynomial":
        return KernelSpec("polynomial", degree=cfg_get(cfg, "algorithm.degree", 2, int))
    if family == "linear":
        return KernelSpec("linear")
    raise ConfigError(f"unknown kernel {family!r}", key="algorithm.kernel")


def _split(ds, fraction, seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(ds.n)
    n_val = int(round(fraction * ds.n))
    return perm[n_val:], perm[:n_val]


def _targets(ds, idx):
    if ds.task == "classification":
        return indicator(ds.y[idx], ds.n_classes)
    return ds.y[idx]


def _error(ds, idx, raw):
    """RMSE for regression; misclassification rate for classification.

    Classification predictors may return either per-class scores (argmaxed
    here) or label vectors directly.
    """
    truth = ds.y[idx]
    raw = np.asarray(raw)
    if ds.task == "classification":
        pred = raw if raw.ndim == 1 else np.argmax(raw, axis=1) + 1
        return float(np.mean(pred != truth))
    return float(np.sqrt(np.mean((raw - truth) ** 2)))


def _default_gamma(kernel, x):
    # 1 / max_i K(x_i, x_i)
    if kernel.family == "gaussian":
        return 1.0
    row_sq = np.einsum("ij,ij->i", x, x)
    diag = row_sq if kernel.family == "linear" else (row_sq + 1.0) ** kernel.degree
    top = float(diag.max()) if diag.size else 1.0
    return 1.0 / max(top, np.finfo(float).tiny)


def _train_model(name, ds, train_idx, cfg, seed, val_idx=None):
    """Fit one algorithm; returns (model, feature_map, predictor, extras)."""
    x = ds.x[train_idx]
    y = _targets(ds, train_idx)
    extras = {}
    fm = None
    if name == "rls":
        model = rls_fit_primal(x, y, cfg_get(cfg, "algorithm.lambda", cast=float))
        predictor = lambda xnew: predict_primal(model, xnew)
    elif name in ("krls", "kols", "tsvd", "landweber"):
        kernel = kernel_from_config(cfg)
        k_mat = gram(kernel, x)
        if name == "krls":
            model = krls_fit(
                k_mat,
                y,
                cfg_get(cfg, "algorithm.lambda", cast=float),
                kernel=kernel,
                train_inputs=x,
            )
        elif name == "kols":
            model = kols_fit(k_mat, y, kernel=kernel, train_inputs=x)
        elif name == "tsvd":
            spec = FilterSpec("tsvd", lam=cfg_get(cfg, "algorithm.lambda", cast=float))
            alpha = apply_filter(eigh_sym(k_mat), y, spec)
            model = DualModel(alpha=alpha, train_inputs=x, kernel=kernel)
        else:
            path = landweber_iterate(
                k_mat,
                y,
                eta=cfg_get(cfg, "algorithm.eta", None, float),
                t_max=cfg_get(cfg, "algorithm.t", 100, int),
            )
            model = DualModel(alpha=path[-1], train_inputs=x, kernel=kernel)
        predictor = lambda xnew: predict_dual(model, xnew)
    elif name == "nkrls":
        kernel = kernel_from_config(cfg)
        m = min(cfg_get(cfg, "algorithm.m", cast=int), x.shape[0])
        order = sample_uniform(x.shape[0], m, seed=seed)
        model = fit_nkrls(
            x, y, kernel, order, cfg_get(cfg, "algorithm.lambda", cast=float)
        )
        predictor = lambda xnew: predict_nystrom(model, xnew)
    elif name == "nytro":
        kernel = kernel_from_config(cfg)
        m = min(cfg_get(cfg, "algorithm.m", cast=int), x.shape[0])
        order = sample_uniform(x.shape[0], m, seed=seed)
        centers = x[order]
        knm = cross_gram(kernel, x, centers)
        kmm = cross_gram(kernel, centers, centers)
        gamma = cfg_get(cfg, "algorithm.gamma", None, float)
        if gamma is None:
            gamma = _default_gamma(kernel, x)
        rng = np.random.default_rng(seed)
        val_rows = rng.permutation(x.shape[0])[: max(1, int(round(0.2 * x.shape[0])))]
        result = nytro_fit(
            knm,
            kmm,
            y,
            gamma,
            cfg_get(cfg, "algorithm.t_max", 200, int),
            val_rows=val_rows,
            kernel=kernel,
            centers=centers,
        )
        model = result.model
        extras["path_curve"] = (
            list(range(1, result.val_errors.size + 1)),
            result.val_errors.tolist(),
        )
        predictor = lambda xnew: predict_nystrom(model, xnew)
    elif name == "rf":
        fm = sample_features(
            x.shape[1],
            cfg_get(cfg, "algorithm.n_features", 256, int),
            cfg_get(cfg, "algorithm.bandwidth", 1.0, float),
            seed=seed,
        )
        model = rf_fit(
            transform(fm, x), y, cfg_get(cfg, "algorithm.lambda", cast=float)
        )
        feature_map = fm
        predictor = lambda xnew: predict_primal(model, transform(feature_map, xnew))
    elif name == "sgm":
        loss = LossSpec(cfg_get(cfg, "algorithm.loss", "square"))
        n = x.shape[0]
        regime = cfg_get(cfg, "algorithm.regime", None)
        if regime is not None:
            sched, t_star = schedule_for_regime(
                regime,
                n,
                beta=cfg_get(cfg, "algorithm.beta", 1.0, float),
                eta1=cfg_get(cfg, "algorithm.eta1", 1.0, float),
            )
        else:
            sched = StepSchedule(
                eta1=cfg_get(cfg, "algorithm.eta1", 1.0, float),
                theta=cfg_get(cfg, "algorithm.theta", 0.0, float),
            )
            t_star = n
        epochs = cfg_get(cfg, "algorithm.epochs", None, int)
        t_bar = epochs * n if epochs is not None else t_star
        if ds.task == "classification":
            if ds.n_classes != 2:
                raise ConfigError(
                    "sgm training handles binary classification only",
                    key="algorithm.name",
                )
            to_pm = lambda labels: np.where(labels == 1, -1.0, 1.0)
            y_run = to_pm(ds.y[train_idx])
        else:
            y_run = y[:, 0] if y.ndim > 1 else y
        x_val = y_val = None
        if val_idx is not None and len(val_idx):
            x_val = ds.x[val_idx]
            y_val = (
                to_pm(ds.y[val_idx])
                if ds.task == "classification"
                else ds.y[val_idx][:, 0]
            )
        result = sgm_run(
            x,
            y_run,
            loss,
            sched,
            t_bar,
            seed=seed,
            record_every=max(1, n),
            x_val=x_val,
            y_val=y_val,
        )
        if result.train_loss is not None:
            extras["sgm_trace"] = {
                "t": result.checkpoints.tolist(),
                "train_loss": result.train_loss.tolist(),
                "validation_loss": result.val_loss.tolist(),
            }
        model = PrimalModel(weights=result.w_last)
        if ds.task == "classification":
            predictor = lambda xnew: np.where(np.asarray(xnew) @ result.w_last < 0, 1, 2)
        else:
            predictor = lambda xnew: np.asarray(xnew) @ result.w_last
    elif name == "irlsc":
        if ds.task != "classification":
            raise ConfigError("irlsc needs classification data", key="data.task")
        lam = cfg_get(cfg, "algorithm.lambda", cast=float)
        alpha_raw = cfg_get(cfg, "algorithm.alpha", "0.0")
        state = rlsc_init(
            x.shape[1], lam, 0.0 if alpha_raw == "auto" else float(alpha_raw)
        )
        labels = ds.y[train_idx]
        # stream in arrival order; renumber so new classes appear contiguously
        remap = {}
        for i in range(x.shape[0]):
            lab = int(labels[i])
            if lab not in remap:
                remap[lab] = len(remap) + 1
            rlsc_update(state, x[i], remap[lab])
        inverse = np.empty(len(remap) + 1, dtype=int)
        for orig, internal in remap.items():
            inverse[internal] = orig
        if alpha_raw == "auto":
            cand = parse_grid(
                cfg_get(cfg, "algorithm.alpha_candidates", "0,0.25,0.5,0.75,1"),
                "algorithm.alpha_candidates",
            )
            chosen = select_alpha(
                state,
                x,
                np.array([remap[int(v)] for v in labels]),
                cand,
                min_count=cfg_get(cfg, "algorithm.min_count", 20, int),
            )
            rlsc_set_alpha(state, chosen)
        model = state
        predictor = lambda xnew: inverse[rlsc_predict_batch(state, xnew)]
    else:
        raise ConfigError(f"unknown algorithm {name!r}", key="algorithm.name")
    return model, fm, predictor, extras


def cmd_train(cfg, seed, jobs, out):
    name = cfg_get(cfg, "algorithm.name")
    if name not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {name!r}", key="algorithm.name")
    ds = load_dataset(cfg, "train", seed)
    frac = cfg_get(cfg, "data.validation_fraction", 0.2, float)
    if frac > 0 and ds.n > 4:
        train_idx, val_idx = _split(ds, frac, seed)
    else:
        train_idx, val_idx = np.arange(ds.n), np.array([], dtype=int)
    t0 = time.perf_counter()
    model, fm, predictor, extras = _train_model(
        name, ds, train_idx, cfg, seed, val_idx=val_idx
    )
    fit_seconds = time.perf_counter() - t0

    suffix = "rmse" if ds.task == "regression" else "error"
    metrics = {f"train_{suffix}": _error(ds, train_idx, predictor(ds.x[train_idx]))}
    if val_idx.size:
        metrics[f"validation_{suffix}"] = _error(ds, val_idx, predictor(ds.x[val_idx]))

    model_path = out / f"model_{name}.json"
    save_model(model, model_path, feature_map=fm)
    save_metadata(ds, out / "dataset_meta.json")
    report = {
        "schema_version": reports.SCHEMA_VERSION,
        "command": "train",
        "algorithm": name,
        "seed": seed,
        "n_train": int(train_idx.size),
        "n_validation": int(val_idx.size),
        "metrics": metrics,
        "timings": {"fit_seconds": fit_seconds},
        "model_file": model_path.name,
    }
    reports.write_json(report, out / "train_report.json")
    reports.write_csv(
        out / "train_metrics.csv", ["metric", "value"], sorted(metrics.items())
    )
    if "path_curve" in extras:
        steps, errors = extras["path_curve"]
        reports.write_csv(
            out / "train_path.csv", ["t", "validation_error"], list(zip(steps, errors))
        )
        plots.plot_path(steps, errors, out / "train_path.png")
    if "sgm_trace" in extras:
        trace = extras["sgm_trace"]
        reports.write_json(
            {"schema_version": reports.SCHEMA_VERSION, **trace},
            out / "sgm_trace.json",
        )
        reports.write_csv(
            out / "sgm_trace.csv",
            ["t", "train_loss", "validation_loss"],
            list(zip(trace["t"], trace["train_loss"], trace["validation_loss"])),
        )
        plots.plot_path(
            trace["t"],
            trace["validation_loss"],
            out / "sgm_trace.png",
            xlabel="iteration",
            ylabel="validation loss",
        )
    return report


def cmd_predict(cfg, seed, jobs, out):
    model, fm = load_model(cfg_get(cfg, "predict.model"))
    ds = load_dataset(cfg, "test", seed)
    if isinstance(model, PrimalModel):
        feats = transform(fm, ds.x) if fm is not None else ds.x
        preds = predict_primal(model, feats)
    elif isinstance(model, DualModel):
        preds = predict_dual(model, ds.x)
    elif isinstance(model, NystromModel):
        preds = predict_nystrom(model, ds.x)
    elif isinstance(model, RlscState):
        preds = rlsc_predict_batch(model, ds.x)
    else:
        raise ConfigError("unsupported model type", key="predict.model")
    preds = np.asarray(preds)
    rows = [[i] + list(np.atleast_1d(p)) for i, p in enumerate(preds)]
    width = len(rows[0]) - 1
    reports.write_csv(
        out / "predictions.csv", ["row"] + [f"y{j}" for j in range(width)], rows
    )
    report = {
        "schema_version": reports.SCHEMA_VERSION,
        "command": "predict",
        "n_predictions": int(preds.shape[0]),
        "predictions_file": "predictions.csv",
    }
    reports.write_json(report, out / "predict_report.json")
    return report


def _make_trainer(name, cfg, seed):
    """Hyperparameter-grid closure used by the cv command."""

    def as_labels(fn):
        return lambda xn: np.argmax(fn(xn), axis=1) + 1

    def trainer(hyper, x, y, task):
        if name == "krls":
            kernel = kernel_from_config(cfg)
            model = krls_fit(
                gram(kernel, x), y, hyper["lam"], kernel=kernel, train_inputs=x
            )
            fn = lambda xn: predict_dual(model, xn)
        elif name == "rls":
            model = rls_fit_primal(x, y, hyper["lam"])
            fn = lambda xn: predict_primal(model, xn)
        elif name == "nkrls":
            kernel = kernel_from_config(cfg)
            order = sample_uniform(x.shape[0], min(hyper["m"], x.shape[0]), seed=seed)
            model = fit_nkrls(x, y, kernel, order, hyper["lam"])
            fn = lambda xn: predict_nystrom(model, xn)
        elif name == "landweber":
            kernel = kernel_from_config(cfg)
            alpha = landweber_iterate(gram(kernel, x), y, t_max=int(hyper["t"]))[-1]
            fn = lambda xn: cross_gram(kernel, xn, x) @ alpha
        else:
            raise ConfigError(
                f"cv does not support algorithm {name!r}", key="algorithm.name"
            )
        return as_labels(fn) if task == "classification" else fn

    return trainer


def _grid_from_config(cfg):
    lams = parse_grid(cfg["grid.lambda"], "grid.lambda") if "grid.lambda" in cfg else [None]
    ms = parse_grid(cfg["grid.m"], "grid.m") if "grid.m" in cfg else [None]
    ts = parse_grid(cfg["grid.t"], "grid.t") if "grid.t" in cfg else [None]
    entries = []
    for lam in lams:
        for m in ms:
            for t in ts:
                hyper = {}
                if lam is not None:
                    hyper["lam"] = float(lam)
                if m is not None:
                    hyper["m"] = int(m)
                if t is not None:
                    hyper["t"] = int(t)
                entries.append(hyper)
    if not entries or all(not h for h in entries):
        raise ConfigError("no hyperparameter grid given", key="grid.lambda")
    return entries


def cmd_cv(cfg, seed, jobs, out):
    name = cfg_get(cfg, "algorithm.name")
    ds = load_dataset(cfg, "train", seed)
    grid = _grid_from_config(cfg)
    trainer = _make_trainer(name, cfg, seed)
    kind = cfg_get(cfg, "cv.kind", "holdout")
    if kind == "holdout":
        result = holdout_cv(
            trainer,
            grid,
            ds,
            split_fraction=cfg_get(cfg, "cv.fraction", 0.2, float),
            seed=seed,
        )
        errors = result.errors
    elif kind == "vfold":
        result = vfold_cv(trainer, grid, ds, cfg_get(cfg, "cv.v", 5, int), seed=seed)
        errors = result.errors.mean(axis=1)
    else:
        raise ConfigError(f"unknown cv kind {kind!r}", key="cv.kind")
    report = {
        "schema_version": reports.SCHEMA_VERSION,
        "command": "cv",
        "algorithm": name,
        "kind": kind,
        "seed": seed,
        "best": result.best,
        "table": [
            {**hyper, "error": float(err)} for hyper, err in zip(grid, errors)
        ],
    }
    reports.write_json(report, out / "cv_report.json")
    keys = sorted({k for h in grid for k in h})
    reports.write_csv(
        out / "cv_table.csv",
        keys + ["error"],
        [[h.get(k, "") for k in keys] + [float(e)] for h, e in zip(grid, errors)],
    )
    lam_values = [h.get("lam") for h in grid]
    if len(grid) > 1 and None not in lam_values and len(set(lam_values)) == len(grid):
        plots.plot_cv_curve(
            lam_values, errors, out / "cv_curve.png", xlabel="lambda", logx=True
        )
    return report


def cmd_path(cfg, seed, jobs, out):
    name = cfg_get(cfg, "algorithm.name")
    ds = load_dataset(cfg, "train", seed)
    if name == "nkrls":
        lambda_grid = parse_grid(cfg_get(cfg, "grid.lambda"), "grid.lambda")
        m_grid = [int(v) for v in parse_grid(cfg_get(cfg, "grid.m"), "grid.m")]
        surface = grid_path_lambda_m(
            ds, kernel_from_config(cfg), lambda_grid, m_grid, seed=seed, jobs=jobs
        )
        report = surface.to_dict()
        report["command"] = "path"
        reports.write_json(report, out / "surface.json")
        reports.write_csv(
            out / "surface.csv",
            ["lambda", "m", "validation_error"],
            reports.surface_csv_rows(surface),
        )
        plots.plot_surface(surface, out / "surface.png")
        return report
    # iteration-indexed paths share the {t, error, time} report schema
    frac = cfg_get(cfg, "data.validation_fraction", 0.2, float)
    train_idx, val_idx = _split(ds, frac, seed)
    x, xv = ds.x[train_idx], ds.x[val_idx]
    y, yv = _targets(ds, train_idx), _targets(ds, val_idx)
    times = None
    if name == "landweber":
        kernel = kernel_from_config(cfg)
        t_max = cfg_get(cfg, "grid.t_max", 200, int)
        k_mat = gram(kernel, x)
        eta = cfg_get(cfg, "algorithm.eta", None, float)
        kv = cross_gram(kernel, xv, x)
        # run the recursion directly so each step gets a timestamp
        sig_max = float(np.linalg.eigvalsh(k_mat)[-1])
        if eta is None:
            eta = 2.0 / x.shape[0] if sig_max < x.shape[0] else 1.0 / sig_max
        alpha = np.zeros_like(y)
        errors, times = [], []
        t0 = time.perf_counter()
        for _ in range(t_max):
            alpha = alpha + eta * (y - k_mat @ alpha)
            errors.append(float(np.sqrt(np.mean((kv @ alpha - yv) ** 2))))
            times.append(time.perf_counter() - t0)
        steps = list(range(1, t_max + 1))
    elif name == "nytro":
        kernel = kernel_from_config(cfg)
        m = min(cfg_get(cfg, "algorithm.m", cast=int), x.shape[0])
        order = sample_uniform(x.shape[0], m, seed=seed)
        centers = x[order]
        x_all = np.vstack([x, xv])
        knm = cross_gram(kernel, x_all, centers)
        kmm = cross_gram(kernel, centers, centers)
        gamma = cfg_get(cfg, "algorithm.gamma", None, float)
        if gamma is None:
            gamma = _default_gamma(kernel, x_all)
        result = nytro_fit(
            knm,
            kmm,
            np.vstack([y, yv]),
            gamma,
            cfg_get(cfg, "grid.t_max", 200, int),
            val_rows=np.arange(x.shape[0], x_all.shape[0]),
            kernel=kernel,
            centers=centers,
        )
        errors = result.val_errors.tolist()
        times = result.cumulative_times.tolist()
        steps = list(range(1, len(errors) + 1))
    elif name == "rf":
        fm = sample_features(
            x.shape[1],
            cfg_get(cfg, "algorithm.n_features", 256, int),
            cfg_get(cfg, "algorithm.bandwidth", 1.0, float),
            seed=seed,
        )
        m_grid = [int(v) for v in parse_grid(cfg_get(cfg, "grid.m"), "grid.m")]
        path = rf_incremental_path(
            x, y, fm, cfg_get(cfg, "algorithm.lambda", cast=float), eval_steps=m_grid
        )
        xtv = transform(fm, xv)
        errors = [
            float(np.sqrt(np.mean((xtv[:, :t] @ model.weights - yv) ** 2)))
            for t, model in zip(path.steps, path.models)
        ]
        steps = path.steps
        times = path.cumulative_times
    else:
        raise ConfigError(
            f"path does not support algorithm {name!r}", key="algorithm.name"
        )
    report = reports.path_report(
        steps, errors, times, extra={"command": "path", "algorithm": name, "seed": seed}
    )
    reports.write_json(report, out / "path_report.json")
    reports.write_csv(
        out / "path_report.csv",
        ["t", "validation_error", "cumulative_time"],
        list(zip(steps, errors, times)),
    )
    plots.plot_path(steps, errors, out / "path_curve.png")
    return report


def cmd_bench(cfg, seed, jobs, out):
    ds = load_dataset(cfg, "train", seed)
    reps = cfg_get(cfg, "bench.repetitions", 3, int)
    if reps < 1:
        raise ConfigError("repetitions must be >= 1", key="bench.repetitions")
    kind = cfg_get(cfg, "bench.kind", "nkrls_path")
    if kind != "nkrls_path":
        raise ConfigError(f"unknown bench kind {kind!r}", key="bench.kind")
    kernel = kernel_from_config(cfg)
    lambda_grid = parse_grid(cfg_get(cfg, "grid.lambda", "1e-6"), "grid.lambda")
    m_grid = sorted(int(v) for v in parse_grid(cfg_get(cfg, "grid.m"), "grid.m"))
    x, y = ds.x, _targets(ds, np.arange(ds.n))
    order = sample_uniform(ds.n, max(m_grid), seed=seed)
    # warm-up keeps JIT compilation out of the timings
    w = min(8, ds.n - 1)
    incremental_path(x[: w + 1], y[: w + 1], np.arange(w), 1e-3, kernel, eval_steps=[w])

    inc_total, naive_total = [], []
    inc_per_m = np.zeros((reps, len(m_grid)))
    naive_per_m = np.zeros((reps, len(m_grid)))
    for rep in range(reps):
        t0 = time.perf_counter()
        for lam in lambda_grid:
            path = incremental_path(x, y, order, lam, kernel, eval_steps=m_grid)
            inc_per_m[rep] += np.asarray(path.cumulative_times)
        inc_total.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        for lam in lambda_grid:
            for j, m in enumerate(m_grid):
                t1 = time.perf_counter()
                fit_nkrls(x, y, kernel, order[:m], lam)
                naive_per_m[rep, j] += time.perf_counter() - t1
        naive_total.append(time.perf_counter() - t0)

    entries = []
    for label, per_m, totals in (
        ("incremental", inc_per_m, inc_total),
        ("naive", naive_per_m, naive_total),
    ):
        for j, m in enumerate(m_grid):
            entries.append(
                {
                    "algorithm": label,
                    "m": int(m),
                    "times": per_m[:, j].tolist(),
                    "mean": float(per_m[:, j].mean()),
                    "std": float(per_m[:, j].std()),
                }
            )
        entries.append(
            {
                "algorithm": f"{label}_total",
                "m": int(max(m_grid)),
                "times": [float(v) for v in totals],
                "mean": float(np.mean(totals)),
                "std": float(np.std(totals)),
            }
        )
    report = reports.bench_report(
        entries,
        extra={
            "command": "bench",
            "seed": seed,
            "n": int(ds.n),
            "lambda_count": len(lambda_grid),
            "m_grid": m_grid,
            "totals": {
                "incremental": float(np.mean(inc_total)),
                "naive": float(np.mean(naive_total)),
            },
        },
    )
    reports.write_json(report, out / "bench_report.json")
    reports.write_csv(
        out / "bench_report.csv",
        ["algorithm", "m", "mean_seconds", "std_seconds"],
        [[e["algorithm"], e["m"], e["mean"], e["std"]] for e in entries],
    )
    totals_only = [e for e in entries if e["algorithm"].endswith("_total")]
    plots.plot_bench(
        [e["algorithm"] for e in totals_only],
        [e["mean"] for e in totals_only],
        [e["std"] for e in totals_only],
        out / "bench_report.png",
    )
    return report


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "path": cmd_path,
    "bench": cmd_bench,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specreg", description="Spectral-regularization kernel learning toolkit"
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="key = value run description")
    parser.add_argument("--seed", type=int, default=0, help="master random seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker cap for grid cells")
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = parse_config(args.config)
        COMMANDS[args.command](cfg, args.seed, args.jobs, out)
    except ConfigError as exc:
        json.dump(
            {"error": "config", "message": str(exc), "key": exc.key}, sys.stderr
        )
        sys.stderr.write("\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
