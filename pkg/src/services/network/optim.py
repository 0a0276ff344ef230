"""Loss, gradient clipping and Adam."""

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from src.core.exceptions import DomainError, NumericError, ShapeError
from src.models import enums

Params = Dict[str, np.ndarray]


def mse_loss(preds: Sequence[float], targets: Sequence[float]) -> Tuple[float, np.ndarray]:
    """
    Mean squared error in semitones squared.

    Returns:
        The loss and its gradient ``2 (pred - target) / N`` per prediction
    """
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.size == 0:
        raise DomainError("mse_loss needs at least one prediction")
    if preds.shape != targets.shape:
        raise ShapeError(f"{preds.shape} predictions vs {targets.shape} targets")
    diff = preds - targets
    return float(np.mean(diff ** 2)), 2.0 * diff / diff.size


def cents_from_mse(mse: float) -> float:
    """Note-level error in cents: 100 * sqrt(mse)."""
    if mse < 0:
        raise DomainError(f"MSE must be non-negative, got {mse}")
    return 100.0 * float(np.sqrt(mse))


def global_norm(grads: Params) -> float:
    return float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads.values())))


def clip_gradients(grads: Params, threshold: float = enums.CLIP_THRESHOLD) -> Tuple[Params, float]:
    """
    Rescale all gradients together when their global L2 norm exceeds ``threshold``.

    Returns:
        The (possibly scaled) gradients and the norm before clipping
    """
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in {name}")
    norm = global_norm(grads)
    if norm <= threshold:
        return grads, norm
    scale = threshold / norm
    return {name: (g * scale).astype(g.dtype, copy=False) for name, g in grads.items()}, norm


@dataclass(eq=False)
class AdamState:
    """First/second moment estimates and step count."""
    lr: float = enums.LEARNING_RATE
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: Params, **kwargs) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
            **kwargs,
        )

    def scalars(self) -> dict:
        return {"lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps, "step": self.step}


def adam_step(params: Params, grads: Params, state: AdamState) -> None:
    """Bias-corrected Adam update of ``params`` in place."""
    if set(grads) != set(params):
        raise ShapeError(f"gradient names differ from parameters: {sorted(set(grads) ^ set(params))}")
    for name, p in params.items():
        if grads[name].shape != p.shape:
            raise ShapeError(f"{name}: gradient shape {grads[name].shape} vs parameter {p.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, p in params.items():
        g = grads[name]
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        update = state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        p -= update.astype(p.dtype, copy=False)
