"""
Layer primitives with explicit forward and backward passes.

Tensors are ``(channels, frequency, time)`` numpy arrays. Every forward
returns the output and a cache; every backward takes the cache and returns
the input gradient plus parameter gradients. The same code runs at 32-bit
for training and 64-bit for gradient checks.
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.core.exceptions import ShapeError, StateError

Pair = Tuple[int, int]


@dataclass(frozen=True)
class ConvLayerSpec:
    """Convolution geometry; pairs are (frequency, time)."""
    name: str
    in_channels: int
    out_channels: int
    kernel: Pair
    stride: Pair = (1, 1)
    padding: Pair = (0, 0)

    @property
    def fan_in(self) -> int:
        return self.in_channels * self.kernel[0] * self.kernel[1]

    def output_shape(self, n_freq: int, n_time: int) -> Pair:
        kf, kt = self.kernel
        sf, st = self.stride
        pf, pt = self.padding
        return (n_freq + 2 * pf - kf) // sf + 1, (n_time + 2 * pt - kt) // st + 1

    def to_dict(self) -> dict:
        data = asdict(self)
        data["kernel"], data["stride"], data["padding"] = list(self.kernel), list(self.stride), list(self.padding)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ConvLayerSpec":
        return cls(
            name=data["name"],
            in_channels=int(data["in_channels"]),
            out_channels=int(data["out_channels"]),
            kernel=tuple(data["kernel"]),
            stride=tuple(data["stride"]),
            padding=tuple(data["padding"]),
        )


CONV_STACK: Tuple[ConvLayerSpec, ...] = (
    ConvLayerSpec("conv1", 3, 128, (5, 5), (1, 2), (2, 2)),
    ConvLayerSpec("conv2", 128, 64, (5, 5), (1, 2), (2, 2)),
    ConvLayerSpec("conv3", 64, 64, (3, 3), (2, 2), (1, 1)),
    ConvLayerSpec("conv4", 64, 64, (3, 3), (1, 1), (1, 1)),
    ConvLayerSpec("conv5", 64, 8, (48, 1), (1, 1), (24, 1)),
    ConvLayerSpec("conv6", 8, 1, (1, 1), (1, 1), (0, 0)),
)


def stack_output_shape(specs, n_freq: int, n_time: int) -> Tuple[int, int, int]:
    """Closed-form ``(channels, freq, time)`` after a conv stack."""
    for spec in specs:
        n_freq, n_time = spec.output_shape(n_freq, n_time)
    return specs[-1].out_channels, n_freq, n_time


# Convolution

@dataclass(eq=False)
class ConvCache:
    padded: np.ndarray
    input_shape: Tuple[int, int, int]
    spec: ConvLayerSpec
    weights: np.ndarray


def _offset_slices(spec: ConvLayerSpec, i: int, j: int, out_f: int, out_t: int):
    sf, st = spec.stride
    return (slice(None), slice(i, i + sf * (out_f - 1) + 1, sf), slice(j, j + st * (out_t - 1) + 1, st))


def conv2d_forward(
    x: np.ndarray, spec: ConvLayerSpec, weights: np.ndarray, bias: np.ndarray
) -> Tuple[np.ndarray, ConvCache]:
    """
    Strided, zero-padded 2-D cross-correlation.

    Args:
        x: ``(C, F, T)`` input
        spec: Layer geometry
        weights: ``(C', C, kf, kt)``
        bias: ``(C',)``

    Returns:
        ``(C', F', T')`` output and the cache for ``conv2d_backward``
    """
    if x.ndim != 3 or x.shape[0] != spec.in_channels:
        raise ShapeError(f"{spec.name}: expected ({spec.in_channels}, F, T) input, got {x.shape}")
    kf, kt = spec.kernel
    if weights.shape != (spec.out_channels, spec.in_channels, kf, kt) or bias.shape != (spec.out_channels,):
        raise ShapeError(f"{spec.name}: weight shape {weights.shape} / bias {bias.shape} do not match the layer")
    out_f, out_t = spec.output_shape(x.shape[1], x.shape[2])
    if out_f < 1 or out_t < 1:
        raise ShapeError(f"{spec.name}: input {x.shape} too small for the kernel")

    pf, pt = spec.padding
    padded = np.pad(x, ((0, 0), (pf, pf), (pt, pt)))
    out = np.zeros((spec.out_channels, out_f, out_t), dtype=x.dtype)
    for i in range(kf):
        for j in range(kt):
            patch = padded[_offset_slices(spec, i, j, out_f, out_t)]
            out += np.tensordot(weights[:, :, i, j], patch, axes=([1], [0]))
    out += bias[:, np.newaxis, np.newaxis]
    return out, ConvCache(padded=padded, input_shape=x.shape, spec=spec, weights=weights)


def conv2d_backward(
    grad_out: np.ndarray, cache: Optional[ConvCache]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients ``(grad_x, grad_w, grad_b)`` of ``conv2d_forward``."""
    if cache is None:
        raise StateError("conv2d_backward called without a forward cache")
    spec, w = cache.spec, cache.weights
    _, out_f, out_t = grad_out.shape
    kf, kt = spec.kernel
    pf, pt = spec.padding

    grad_b = grad_out.sum(axis=(1, 2))
    grad_w = np.zeros_like(w)
    grad_padded = np.zeros_like(cache.padded)
    for i in range(kf):
        for j in range(kt):
            window = _offset_slices(spec, i, j, out_f, out_t)
            grad_w[:, :, i, j] = np.tensordot(grad_out, cache.padded[window], axes=([1, 2], [1, 2]))
            grad_padded[window] += np.tensordot(w[:, :, i, j], grad_out, axes=([0], [0]))

    _, n_f, n_t = cache.input_shape
    grad_x = grad_padded[:, pf : pf + n_f, pt : pt + n_t]
    return grad_x, grad_w, grad_b


def relu(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mask = x > 0
    return x * mask, mask


def relu_backward(grad: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return grad * mask


# GRU

GRU_INPUT_WEIGHTS = ("W_z", "W_r", "W_h")
GRU_RECURRENT_WEIGHTS = ("U_z", "U_r", "U_h")
GRU_BIASES = ("b_z", "b_r", "b_h")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(eq=False)
class GruCache:
    x: np.ndarray
    h_prev: np.ndarray
    z: np.ndarray
    r: np.ndarray
    candidate: np.ndarray


def gru_step(x: np.ndarray, h_prev: np.ndarray, params: Dict[str, np.ndarray]) -> Tuple[np.ndarray, GruCache]:
    """
    One GRU step.

    ``z`` and ``r`` are sigmoid gates, the candidate is
    ``tanh(W_h x + U_h (r * h_prev) + b_h)`` and the new state is
    ``(1 - z) * h_prev + z * candidate``.
    """
    hidden, n_in = params["W_z"].shape
    if x.shape != (n_in,) or h_prev.shape != (hidden,):
        raise ShapeError(f"GRU expects x ({n_in},) and h ({hidden},), got {x.shape} and {h_prev.shape}")
    z = _sigmoid(params["W_z"] @ x + params["U_z"] @ h_prev + params["b_z"])
    r = _sigmoid(params["W_r"] @ x + params["U_r"] @ h_prev + params["b_r"])
    candidate = np.tanh(params["W_h"] @ x + params["U_h"] @ (r * h_prev) + params["b_h"])
    h = (1.0 - z) * h_prev + z * candidate
    return h, GruCache(x=x, h_prev=h_prev, z=z, r=r, candidate=candidate)


def gru_step_backward(
    grad_h: np.ndarray, cache: GruCache, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """Accumulate parameter gradients into ``grads``; return ``(grad_x, grad_h_prev)``."""
    x, h_prev, z, r, c = cache.x, cache.h_prev, cache.z, cache.r, cache.candidate

    grad_z = grad_h * (c - h_prev)
    grad_c = grad_h * z
    grad_h_prev = grad_h * (1.0 - z)

    pre_c = grad_c * (1.0 - c ** 2)
    grads["W_h"] += np.outer(pre_c, x)
    grads["U_h"] += np.outer(pre_c, r * h_prev)
    grads["b_h"] += pre_c
    grad_rh = params["U_h"].T @ pre_c
    grad_r = grad_rh * h_prev
    grad_h_prev += grad_rh * r

    pre_z = grad_z * z * (1.0 - z)
    grads["W_z"] += np.outer(pre_z, x)
    grads["U_z"] += np.outer(pre_z, h_prev)
    grads["b_z"] += pre_z
    grad_h_prev += params["U_z"].T @ pre_z

    pre_r = grad_r * r * (1.0 - r)
    grads["W_r"] += np.outer(pre_r, x)
    grads["U_r"] += np.outer(pre_r, h_prev)
    grads["b_r"] += pre_r
    grad_h_prev += params["U_r"].T @ pre_r

    grad_x = params["W_z"].T @ pre_z + params["W_r"].T @ pre_r + params["W_h"].T @ pre_c
    return grad_x, grad_h_prev


def gru_forward(
    xs: np.ndarray, h0: np.ndarray, params: Dict[str, np.ndarray]
) -> Tuple[np.ndarray, List[GruCache]]:
    """Run over ``xs`` (``(T, input_size)``); return the final state and per-step caches."""
    h = h0
    caches: List[GruCache] = []
    for x in xs:
        h, cache = gru_step(x, h, params)
        caches.append(cache)
    return h, caches


def gru_backward(
    grad_h_last: np.ndarray, caches: List[GruCache], params: Dict[str, np.ndarray]
) -> Tuple[np.ndarray, np.ndarray, Dict[str, np.ndarray]]:
    """
    Backpropagate a gradient on the last hidden state through time.

    Returns:
        ``(grad_xs, grad_h0, grads)`` with ``grad_xs`` shaped like the inputs
    """
    if not caches:
        raise StateError("gru_backward called without a forward cache")
    grads = {name: np.zeros_like(value) for name, value in params.items()}
    grad_xs = np.zeros((len(caches), caches[0].x.size), dtype=grad_h_last.dtype)
    grad_h = grad_h_last
    for t in range(len(caches) - 1, -1, -1):
        grad_xs[t], grad_h = gru_step_backward(grad_h, caches[t], params, grads)
    return grad_xs, grad_h, grads


# Dense

def dense_forward(h: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> float:
    """Linear head ``weights @ h + bias`` producing one scalar."""
    return float((weights @ h + bias)[0])


def dense_backward(grad_out: float, h: np.ndarray, weights: np.ndarray):
    """``(grad_h, grad_w, grad_b)`` for a scalar output gradient."""
    grad_w = grad_out * h[np.newaxis, :]
    grad_b = np.array([grad_out], dtype=weights.dtype)
    grad_h = grad_out * weights[0]
    return grad_h, grad_w, grad_b
