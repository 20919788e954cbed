"""Versioned JSON containers for trained models and classifier checkpoints."""

import json

import numpy as np

from .errors import ParseError
from .exact import DualModel, PrimalModel
from .kernels import KernelSpec
from .nystrom import NystromModel
from .random_features import FeatureMap
from .rlsc import RlscState, rlsc_from_dict, rlsc_to_dict

SCHEMA_VERSION = 1


def _kernel_dict(kernel):
    return None if kernel is None else kernel.to_dict()


def _kernel_from(d):
    return None if d is None else KernelSpec.from_dict(d)


def model_to_dict(model, feature_map=None):
    if isinstance(model, PrimalModel):
        payload = {"model_type": "primal", "weights": model.weights.tolist()}
        if feature_map is not None:
            payload["feature_map"] = feature_map.to_dict()
        return payload
    if isinstance(model, DualModel):
        return {
            "model_type": "dual",
            "alpha": model.alpha.tolist(),
            "train_inputs": None
            if model.train_inputs is None
            else model.train_inputs.tolist(),
            "kernel": _kernel_dict(model.kernel),
        }
    if isinstance(model, NystromModel):
        return {
            "model_type": "nystrom",
            "alpha_tilde": model.alpha_tilde.tolist(),
            "centers": None if model.centers is None else model.centers.tolist(),
            "kernel": _kernel_dict(model.kernel),
            "lam": model.lam,
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d):
    kind = d.get("model_type")
    if kind == "primal":
        model = PrimalModel(weights=np.array(d["weights"], dtype=float))
        fm = d.get("feature_map")
        return (model, FeatureMap.from_dict(fm)) if fm else (model, None)
    if kind == "dual":
        return (
            DualModel(
                alpha=np.array(d["alpha"], dtype=float),
                train_inputs=None
                if d["train_inputs"] is None
                else np.array(d["train_inputs"], dtype=float),
                kernel=_kernel_from(d["kernel"]),
            ),
            None,
        )
    if kind == "nystrom":
        return (
            NystromModel(
                alpha_tilde=np.array(d["alpha_tilde"], dtype=float),
                centers=None
                if d["centers"] is None
                else np.array(d["centers"], dtype=float),
                kernel=_kernel_from(d["kernel"]),
                lam=float(d.get("lam", 0.0)),
            ),
            None,
        )
    if kind == "rlsc_state":
        return rlsc_from_dict(d["state"]), None
    raise ParseError(f"unknown model type {kind!r}")


def save_model(model, path, feature_map=None):
    if isinstance(model, RlscState):
        payload = {"model_type": "rlsc_state", "state": rlsc_to_dict(model)}
    else:
        payload = model_to_dict(model, feature_map=feature_map)
    payload["schema_version"] = SCHEMA_VERSION
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_model(path):
    """Returns (model, feature_map_or_None)."""
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported model schema version {version!r}")
    return model_from_dict(payload)
