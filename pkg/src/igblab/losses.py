"""The three classification losses as value/gradient pairs over p_y.

All three act on the predicted probability of the labelled class:

* cross-entropy:   -log(p)
* blurry:          -p**gamma * log(p); the gradient changes sign at
                   p = exp(-1/gamma), so below that point the loss pushes
                   the labelled class's probability *down*
* piecewise-zero:  0 (with zero gradient) for p <= cutoff, else -log(p)

Probabilities are clamped to [epsilon, 1] before any log or power, which
keeps every value finite even in the p ~ 0 regime produced by severe
initialization bias. Gradients with respect to logits go through the
explicit softmax Jacobian row rather than autodiff, so the whole chain is
auditable and checkable against finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "LossSpec",
    "ClampPolicy",
    "DEFAULT_CLAMP",
    "cross_entropy",
    "blurry",
    "piecewise_zero",
    "loss_value",
    "loss_grad_p",
    "bl_sign_flip_point",
    "loss_grad_logits",
    "finite_diff_oracle",
    "batch_loss_and_logit_grads",
]

KINDS = ("ce", "bl", "pz")


@dataclass(frozen=True)
class LossSpec:
    """Tagged choice of loss: kind in {'ce', 'bl', 'pz'}.

    gamma is only meaningful for 'bl'; cutoff only for 'pz'.
    """

    kind: str
    gamma: float = 0.0
    cutoff: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown loss kind {self.kind!r}, expected one of {KINDS}")
        if self.kind == "bl" and self.gamma < 0.0:
            raise DomainError(f"blurry loss requires gamma >= 0, got {self.gamma}")
        if self.kind == "pz" and not 0.0 <= self.cutoff <= 1.0:
            raise DomainError(f"piecewise-zero loss requires cutoff in [0, 1], got {self.cutoff}")


def cross_entropy() -> LossSpec:
    return LossSpec("ce")


def blurry(gamma: float) -> LossSpec:
    return LossSpec("bl", gamma=float(gamma))


def piecewise_zero(cutoff: float) -> LossSpec:
    return LossSpec("pz", cutoff=float(cutoff))


@dataclass(frozen=True)
class ClampPolicy:
    """Probabilities are clamped to [epsilon, 1] before log/power."""

    epsilon: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1e-6:
            raise DomainError(f"clamp epsilon must be in (0, 1e-6), got {self.epsilon}")

    def apply(self, p: float) -> float:
        return min(max(p, self.epsilon), 1.0)


DEFAULT_CLAMP = ClampPolicy()

# Slack accepted on the [0, 1] domain check before rejecting p.
_DOMAIN_SLACK = 1e-9


def _check_p(p: float) -> None:
    if not -_DOMAIN_SLACK <= p <= 1.0 + _DOMAIN_SLACK:
        raise DomainError(f"probability {p} outside [0, 1]")


def loss_value(spec: LossSpec, p: float, clamp: ClampPolicy = DEFAULT_CLAMP) -> float:
    """Loss at labelled-class probability p. Always finite and >= 0."""
    _check_p(p)
    pc = clamp.apply(p)
    if spec.kind == "ce":
        return -math.log(pc)
    if spec.kind == "bl":
        return -(pc**spec.gamma) * math.log(pc)
    # pz: the branch condition uses the raw probability, value at p == cutoff is 0
    if p <= spec.cutoff:
        return 0.0
    return -math.log(pc)


def loss_grad_p(spec: LossSpec, p: float, clamp: ClampPolicy = DEFAULT_CLAMP) -> float:
    """dLoss/dp at the clamped probability.

    Blurry: -p**(gamma-1) * (gamma*log(p) + 1), positive exactly for
    p < exp(-1/gamma). Piecewise-zero: 0 on p <= cutoff (including the
    subgradient at exactly p == cutoff), else -1/p.
    """
    _check_p(p)
    pc = clamp.apply(p)
    if spec.kind == "ce":
        return -1.0 / pc
    if spec.kind == "bl":
        return -(pc ** (spec.gamma - 1.0)) * (spec.gamma * math.log(pc) + 1.0)
    if p <= spec.cutoff:
        return 0.0
    return -1.0 / pc


def bl_sign_flip_point(gamma: float) -> float:
    """The probability exp(-1/gamma) where the blurry-loss gradient crosses zero."""
    if gamma <= 0.0:
        raise DomainError(f"sign flip requires gamma > 0, got {gamma}")
    return math.exp(-1.0 / gamma)


def _logit_scale(spec: LossSpec, p_label: float, clamp: ClampPolicy) -> float:
    """g(p)*p with g = dLoss/dp, simplified per loss so cancellations are exact.

    The product is what the softmax chain rule needs: dL/dz_j = g*p*(d_ij - p_j).
    For cross-entropy it is exactly -1, which keeps the classical
    probs - onehot gradient intact even when p underflows.
    """
    if spec.kind == "ce":
        return -1.0
    if spec.kind == "bl":
        pc = clamp.apply(p_label)
        return -(pc**spec.gamma) * (spec.gamma * math.log(pc) + 1.0)
    return 0.0 if p_label <= spec.cutoff else -1.0


def loss_grad_logits(
    spec: LossSpec,
    probs: Sequence[float] | np.ndarray,
    label: int,
    clamp: ClampPolicy = DEFAULT_CLAMP,
) -> np.ndarray:
    """Gradient of the loss with respect to the logits that produced probs.

    Chain rule through the softmax Jacobian row:
    dL/dz_j = g * p_label * (delta(label, j) - p_j), g = dLoss/dp at p_label.
    For cross-entropy this reduces to probs - onehot(label).
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1:
        raise DomainError(f"probs must be a vector, got {p.ndim}-D")
    if not 0 <= label < p.size:
        raise DomainError(f"label {label} out of range for {p.size} classes")
    if abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"probs sum to {p.sum()}, expected 1")
    scale = _logit_scale(spec, float(p[label]), clamp)
    grad = -scale * p
    grad[label] += scale
    return grad


def batch_loss_and_logit_grads(
    spec: LossSpec,
    probs: np.ndarray,
    labels: np.ndarray,
    clamp: ClampPolicy = DEFAULT_CLAMP,
) -> tuple[float, np.ndarray]:
    """Mean loss over a batch and the matching dLoss/dlogits rows.

    probs: (n, K) softmax rows; labels: (n,) ints. The mean reduction puts a
    1/n factor on every row, so duplicated samples contribute additively.
    """
    n = probs.shape[0]
    idx = np.arange(n)
    p = probs[idx, labels]
    pc = np.clip(p, clamp.epsilon, 1.0)
    if spec.kind == "ce":
        values = -np.log(pc)
        scale = np.full(n, -1.0)
    elif spec.kind == "bl":
        logp = np.log(pc)
        values = -(pc**spec.gamma) * logp
        scale = -(pc**spec.gamma) * (spec.gamma * logp + 1.0)
    else:
        below = p <= spec.cutoff
        values = np.where(below, 0.0, -np.log(pc))
        scale = np.where(below, 0.0, -1.0)
    grads = -probs * scale[:, None]
    grads[idx, labels] += scale
    return float(values.mean()), grads / n


def finite_diff_oracle(
    spec: LossSpec,
    probs_fn: Callable[[np.ndarray], np.ndarray],
    logits: Sequence[float] | np.ndarray,
    label: int,
    h: float,
    clamp: ClampPolicy = DEFAULT_CLAMP,
) -> np.ndarray:
    """Central-difference gradient of loss(probs_fn(logits)[label]) per logit.

    Independent of loss_grad_logits: it only evaluates the scalar loss.
    """
    if not 1e-8 <= h <= 1e-4:
        raise DomainError(f"finite-difference step h must be in [1e-8, 1e-4], got {h}")
    z = np.asarray(logits, dtype=np.float64).copy()
    grad = np.empty_like(z)
    for j in range(z.size):
        orig = z[j]
        z[j] = orig + h
        up = loss_value(spec, float(probs_fn(z)[label]), clamp)
        z[j] = orig - h
        down = loss_value(spec, float(probs_fn(z)[label]), clamp)
        z[j] = orig
        grad[j] = (up - down) / (2.0 * h)
    return grad
