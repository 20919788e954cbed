"""Dataset containers, loaders (CSV, LIBSVM), preprocessing, synthetic generators."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ParseError


@dataclass(frozen=True)
class Dataset:
    """Dense inputs plus targets.

    For regression ``y`` is an (n, T) float matrix; for classification it is
    an (n,) integer vector with contiguous labels 1..T.  ``label_map`` records
    how original labels were renumbered.
    """

    x: np.ndarray
    y: np.ndarray
    task: str
    names: list | None = None
    label_map: dict | None = field(default=None)

    def __post_init__(self):
        if self.task not in ("regression", "classification"):
            raise ParameterError(f"unknown task {self.task!r}")
        if self.x.ndim != 2 or self.x.shape[0] < 1:
            raise ParameterError("X must be a nonempty matrix")
        if not np.all(np.isfinite(self.x)):
            raise ParameterError("X contains non-finite entries")
        if self.task == "classification":
            labels = np.unique(self.y)
            if not np.array_equal(labels, np.arange(1, labels.size + 1)):
                raise ParameterError("class labels must be contiguous 1..T")
        elif not np.all(np.isfinite(self.y)):
            raise ParameterError("Y contains non-finite entries")

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def n_classes(self):
        return int(self.y.max()) if self.task == "classification" else 0


def indicator(labels, n_classes=None):
    """One-hot (n, T) target matrix for contiguous labels 1..T."""
    labels = np.asarray(labels, dtype=int)
    t = int(labels.max()) if n_classes is None else n_classes
    out = np.zeros((labels.shape[0], t))
    out[np.arange(labels.shape[0]), labels - 1] = 1.0
    return out


def _map_labels(raw):
    values = sorted(set(raw))
    mapping = {v: i + 1 for i, v in enumerate(values)}
    return np.array([mapping[v] for v in raw], dtype=int), mapping


def load_csv(path, target_columns="last", has_header=False, task="regression"):
    """Load a comma-separated numeric file; target columns are split into Y."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"non-numeric cell ({exc})", line=lineno) from None
            if len(rows) > 1 and len(rows[-1]) != len(rows[0]):
                raise ParseError(
                    f"ragged row: {len(rows[-1])} columns, expected {len(rows[0])}",
                    line=lineno,
                )
    if not rows:
        raise ParseError("file contains no data rows", line=1)
    mat = np.array(rows, dtype=float)
    if not np.all(np.isfinite(mat)):
        bad = int(np.where(~np.isfinite(mat).all(axis=1))[0][0]) + 1
        raise ParseError("non-finite value", line=bad)
    ncol = mat.shape[1]
    if target_columns == "last":
        target_columns = [ncol - 1]
    targets = [c % ncol for c in target_columns]
    keep = [c for c in range(ncol) if c not in targets]
    if not keep:
        raise ParseError("no feature columns left after extracting targets", line=1)
    x = mat[:, keep]
    y = mat[:, targets]
    if task == "classification":
        labels, mapping = _map_labels(y[:, 0].tolist())
        return Dataset(x=x, y=labels, task=task, label_map=mapping)
    return Dataset(x=x, y=y, task=task)


def load_libsvm(path, task="classification"):
    """Load sparse `label idx:val ...` text into a dense Dataset.

    Feature indices are 1-based and must be strictly increasing per line;
    absent indices become zeros.  Labels are renumbered to contiguous 1..T
    with the mapping recorded on the dataset.
    """
    labels_raw, rows, width = [], [], 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                label = float(parts[0])
            except ValueError:
                raise ParseError(f"bad label {parts[0]!r}", line=lineno) from None
            entries = []
            prev = 0
            for tok in parts[1:]:
                if ":" not in tok:
                    raise ParseError(f"malformed pair {tok!r}", line=lineno)
                idx_s, val_s = tok.split(":", 1)
                try:
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise ParseError(f"malformed pair {tok!r}", line=lineno) from None
                if idx <= prev:
                    raise ParseError(
                        f"indices not strictly increasing at {tok!r}", line=lineno
                    )
                if not np.isfinite(val):
                    raise ParseError(f"non-finite value {tok!r}", line=lineno)
                entries.append((idx, val))
                prev = idx
            labels_raw.append(label)
            rows.append(entries)
            if entries:
                width = max(width, entries[-1][0])
    if not rows:
        raise ParseError("file contains no data rows", line=1)
    x = np.zeros((len(rows), width))
    for i, entries in enumerate(rows):
        for idx, val in entries:
            x[i, idx - 1] = val
    if task == "classification":
        y, mapping = _map_labels(labels_raw)
        return Dataset(x=x, y=y, task=task, label_map=mapping)
    return Dataset(x=x, y=np.array(labels_raw)[:, None], task=task)


def save_libsvm(ds, path):
    """Write a dataset in the sparse text format (zeros omitted)."""
    inv = None
    if ds.label_map is not None:
        inv = {v: k for k, v in ds.label_map.items()}
    with open(path, "w") as fh:
        for i in range(ds.n):
            label = ds.y[i] if ds.task == "classification" else ds.y[i, 0]
            if inv is not None:
                label = inv[int(label)]
            label = int(label) if float(label).is_integer() else float(label)
            cells = [str(label)]
            for j, v in enumerate(ds.x[i], start=1):
                if v != 0.0:
                    cells.append(f"{j}:{v:.17g}")
            fh.write(" ".join(cells) + "\n")


def save_metadata(ds, path):
    """JSON sidecar describing a dataset: task, sizes, label mapping, names."""
    import json

    meta = {
        "task": ds.task,
        "n": int(ds.n),
        "d": int(ds.x.shape[1]),
        "names": ds.names,
        "label_map": None
        if ds.label_map is None
        else {str(k): int(v) for k, v in ds.label_map.items()},
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)


def load_metadata(path):
    import json

    with open(path) as fh:
        return json.load(fh)


def standardize(ds):
    """Per-feature zero mean, unit variance; constant features keep scale 1."""
    if ds.n < 2:
        raise ParameterError("standardize needs at least two rows")
    mean = ds.x.mean(axis=0)
    std = ds.x.std(axis=0, ddof=0)
    std = np.where(std == 0.0, 1.0, std)
    out = Dataset(
        x=(ds.x - mean) / std,
        y=ds.y,
        task=ds.task,
        names=ds.names,
        label_map=ds.label_map,
    )
    return out, mean, std


def apply_standardize(ds, mean, std):
    return Dataset(
        x=(ds.x - mean) / std,
        y=ds.y,
        task=ds.task,
        names=ds.names,
        label_map=ds.label_map,
    )


def synth_gaussian_mixture_2d(
    n,
    gamma=0.5,
    mu_plus=(1.0, 0.0),
    mu_minus=(-1.0, 0.0),
    sigma_plus=0.6,
    sigma_minus=0.6,
    seed=0,
):
    """Two spherical Gaussians in the plane with class prior gamma on +1.

    Original labels are {+1, -1}; they map to contiguous classes with the
    mapping recorded (sorted order, so -1 -> 1 and +1 -> 2).
    """
    if not 0 < gamma <= 1:
        raise ParameterError("gamma must be in (0, 1]")
    if sigma_plus <= 0 or sigma_minus <= 0:
        raise ParameterError("standard deviations must be positive")
    rng = np.random.default_rng(seed)
    plus = rng.random(n) < gamma
    x = np.empty((n, 2))
    x[plus] = np.asarray(mu_plus) + sigma_plus * rng.standard_normal((plus.sum(), 2))
    x[~plus] = np.asarray(mu_minus) + sigma_minus * rng.standard_normal(
        ((~plus).sum(), 2)
    )
    raw = np.where(plus, 1, -1)
    labels, mapping = _map_labels(raw.tolist())
    return Dataset(x=x, y=labels, task="classification", label_map=mapping)


def synth_linear_regression(n, d, w_star, noise_sigma=0.0, design="random", seed=0):
    """y = X w* + eps with Gaussian noise.

    Random design samples X uniformly on [-1, 1]^d; fixed design evaluates a
    Chebyshev basis on an equispaced grid (deterministic, full rank).
    """
    if noise_sigma < 0:
        raise ParameterError("noise_sigma must be nonnegative")
    w_star = np.asarray(w_star, dtype=float).reshape(d)
    rng = np.random.default_rng(seed)
    if design == "random":
        x = rng.uniform(-1.0, 1.0, size=(n, d))
    elif design == "fixed":
        grid = np.linspace(-1.0, 1.0, n)
        x = np.polynomial.chebyshev.chebvander(grid, d)[:, 1:]
    else:
        raise ParameterError(f"unknown design {design!r}")
    y = x @ w_star + noise_sigma * rng.standard_normal(n)
    return Dataset(x=x, y=y[:, None], task="regression")
