"""Stochastic gradient method over linearly parameterized functions.

One uniformly drawn sample per step, left-derivative subgradients, and both
the last iterate and the step-size-weighted average are tracked:

    w_{t+1} = w_t - eta_t l'_-(y_j, <w_t, x_j>) x_j,    w_1 = 0
    wbar_t  = sum_k eta_k w_k / sum_k eta_k

Step-size schedules follow the tuned forms eta_t = eta1 * t^{-theta} with the
four standard regimes (constant in n, 1/sqrt(t) decay, and the two
beta-tuned single-pass choices).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ParameterError

LOSSES = ("square", "hinge", "logistic")
REGIMES = ("const_sqrt_n", "decay_sqrt_t", "tuned_const", "tuned_decay")


@dataclass(frozen=True)
class LossSpec:
    kind: str

    def __post_init__(self):
        if self.kind not in LOSSES:
            raise ParameterError(f"unknown loss {self.kind!r}")


def loss_value(spec, y, a):
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    if spec.kind == "square":
        return (a - y) ** 2
    if spec.kind == "hinge":
        return np.maximum(0.0, 1.0 - y * a)
    return np.logaddexp(0.0, -y * a)


def loss_left_derivative(spec, y, a):
    """Left-hand derivative of the loss in its second argument."""
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    if spec.kind == "square":
        return 2.0 * (a - y)
    if spec.kind == "hinge":
        return np.where(y * a <= 1.0, -y, 0.0)
    return -y * expit(-y * a)


@dataclass(frozen=True)
class StepSchedule:
    """eta_t = eta1 * t^{-theta}, non-increasing for theta in [0, 1)."""

    eta1: float
    theta: float = 0.0

    def __post_init__(self):
        if self.eta1 <= 0:
            raise ParameterError("eta1 must be positive")
        if not 0.0 <= self.theta < 1.0:
            raise ParameterError("theta must lie in [0, 1)")

    def at(self, t):
        return self.eta1 if self.theta == 0.0 else self.eta1 * t ** (-self.theta)


def schedule_for_regime(regime, n, beta=1.0, eta1=1.0):
    """Step-size schedule and stopping time for the named regime.

    const_sqrt_n: eta_t = eta1 / sqrt(n), t* = ceil(n^((beta+3)/(2(beta+1))))
    decay_sqrt_t: eta_t = eta1 / sqrt(t), t* = ceil(n^(2/(beta+1)))
    tuned_const:  eta_t = eta1 * n^(-beta/(beta+1)), t* = n
    tuned_decay:  eta_t = eta1 * t^(-beta/(beta+1)), t* = n
    """
    if not 0.0 < beta <= 1.0:
        raise ParameterError("beta must lie in (0, 1]")
    if n < 1:
        raise ParameterError("n must be >= 1")
    if regime == "const_sqrt_n":
        sched = StepSchedule(eta1=eta1 / np.sqrt(n))
        t_star = int(np.ceil(n ** ((beta + 3.0) / (2.0 * (beta + 1.0)))))
    elif regime == "decay_sqrt_t":
        sched = StepSchedule(eta1=eta1, theta=0.5)
        t_star = int(np.ceil(n ** (2.0 / (beta + 1.0))))
    elif regime == "tuned_const":
        sched = StepSchedule(eta1=eta1 * n ** (-beta / (beta + 1.0)))
        t_star = n
    elif regime == "tuned_decay":
        sched = StepSchedule(eta1=eta1, theta=beta / (beta + 1.0))
        t_star = n
    else:
        raise ParameterError(f"unknown regime {regime!r}")
    return sched, t_star


@dataclass
class SgmResult:
    checkpoints: np.ndarray
    iterates: np.ndarray
    averaged: np.ndarray
    train_loss: np.ndarray | None = None
    val_loss: np.ndarray | None = None

    @property
    def w_last(self):
        return self.iterates[-1]

    @property
    def wbar_last(self):
        return self.averaged[-1]


def sgm_run(
    x_feat,
    y,
    loss,
    sched,
    t_bar,
    seed=0,
    record_every=1,
    x_val=None,
    y_val=None,
):
    """Run t_bar steps; record (w_t, wbar_t) at the checkpoint times.

    The recorded iterate at time t is the one entering step t (so t_bar = 1
    returns the zero initialization), matching the averaged-iterate
    definition.  Losses at the checkpoints are mean losses under the recorded
    iterate when validation data are supplied.
    """
    if t_bar < 1:
        raise ParameterError("t_bar must be >= 1")
    x_feat = np.asarray(x_feat, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = x_feat.shape
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, n, size=t_bar)

    checkpoints = np.arange(record_every, t_bar + 1, record_every)
    if checkpoints.size == 0 or checkpoints[-1] != t_bar:
        checkpoints = np.append(checkpoints, t_bar)
    cset = set(int(t) for t in checkpoints)

    track_loss = x_val is not None
    w = np.zeros(p)
    wbar = np.zeros(p)
    a_sum = 0.0
    iterates = np.empty((checkpoints.size, p))
    averaged = np.empty((checkpoints.size, p))
    train_loss = np.empty(checkpoints.size) if track_loss else None
    val_loss = np.empty(checkpoints.size) if track_loss else None
    out = 0
    for t in range(1, t_bar + 1):
        eta = sched.at(t)
        a_sum += eta
        wbar += (eta / a_sum) * (w - wbar)
        if t in cset:
            iterates[out] = w
            averaged[out] = wbar
            if track_loss:
                train_loss[out] = float(np.mean(loss_value(loss, y, x_feat @ w)))
                val_loss[out] = float(
                    np.mean(loss_value(loss, np.asarray(y_val).ravel(), x_val @ w))
                )
            out += 1
        if t < t_bar:
            j = draws[t - 1]
            grad = loss_left_derivative(loss, y[j], float(w @ x_feat[j]))
            w = w - eta * float(grad) * x_feat[j]
    return SgmResult(
        checkpoints=checkpoints,
        iterates=iterates,
        averaged=averaged,
        train_loss=train_loss,
        val_loss=val_loss,
    )
