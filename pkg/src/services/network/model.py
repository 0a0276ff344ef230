"""
Convolutional-recurrent regressor of per-note pitch shifts.

Six convolutions (rectifier after the first five) map a ``(3, bins, T)``
note tensor to ``(1, F', T')``; each of the ``T'`` columns is one GRU input
step, and a dense head reads the final hidden state as a shift in semitones.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DegenerateNoteError, ShapeError, StateError
from src.models import enums
from src.models.signals import ModelInput
from src.services.network.layers import (
    GRU_BIASES,
    GRU_INPUT_WEIGHTS,
    GRU_RECURRENT_WEIGHTS,
    CONV_STACK,
    ConvCache,
    ConvLayerSpec,
    GruCache,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    gru_backward,
    gru_forward,
    relu,
    relu_backward,
    stack_output_shape,
)

logger = logging.getLogger(__name__)

HIDDEN_SIZE = 64

Params = Dict[str, np.ndarray]


def he_init(spec: ConvLayerSpec, rng: np.random.Generator, dtype=np.float32) -> Tuple[np.ndarray, np.ndarray]:
    """Weights ~ N(0, 2 / fan_in), zero bias."""
    shape = (spec.out_channels, spec.in_channels, *spec.kernel)
    w = rng.normal(0.0, np.sqrt(2.0 / spec.fan_in), size=shape).astype(dtype)
    return w, np.zeros(spec.out_channels, dtype=dtype)


def orthogonal_init(n: int, rng: np.random.Generator, dtype=np.float32) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return (q * np.sign(np.diag(r))).astype(dtype)


def gru_hidden_init(rng: np.random.Generator, hidden: int = HIDDEN_SIZE, dtype=np.float32) -> np.ndarray:
    """Initial hidden state of a song's first note, ~ N(0, 1e-4 ** 2)."""
    return rng.normal(0.0, enums.HIDDEN_INIT_STD, size=hidden).astype(dtype)


@dataclass(eq=False)
class ForwardCache:
    conv: List[ConvCache] = field(default_factory=list)
    masks: List[np.ndarray] = field(default_factory=list)
    conv_shape: Tuple[int, int, int] = (0, 0, 0)
    gru: List[GruCache] = field(default_factory=list)
    h_last: Optional[np.ndarray] = None


class AutotunerNet:
    """
    The conv stack, a GRU and a dense head with a flat named parameter table.

    Parameter names are ``<conv>.w``, ``<conv>.b``, ``gru.<W|U|b>_<z|r|h>``,
    ``dense.w`` and ``dense.b``.
    """

    def __init__(
        self,
        params: Params,
        specs: Sequence[ConvLayerSpec] = CONV_STACK,
        n_bins: int = enums.TRUNCATED_BINS,
        hidden: int = HIDDEN_SIZE,
        min_frames: int = enums.MIN_NOTE_FRAMES_FOR_NET,
    ):
        self.specs = tuple(specs)
        self.n_bins = n_bins
        self.hidden = hidden
        self.min_frames = min_frames
        self.gru_input = self._gru_input_size()
        self.params = params
        self._check_params()

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        specs: Sequence[ConvLayerSpec] = CONV_STACK,
        n_bins: int = enums.TRUNCATED_BINS,
        hidden: int = HIDDEN_SIZE,
        dtype=np.float32,
        **kwargs,
    ) -> "AutotunerNet":
        """He-initialized convolutions, GRU input and dense weights; orthogonal recurrent weights."""
        params: Params = {}
        for spec in specs:
            params[f"{spec.name}.w"], params[f"{spec.name}.b"] = he_init(spec, rng, dtype)
        n_in = int(np.prod(stack_output_shape(specs, n_bins, 64)[:2]))
        for name in GRU_INPUT_WEIGHTS:
            params[f"gru.{name}"] = rng.normal(0.0, np.sqrt(2.0 / n_in), size=(hidden, n_in)).astype(dtype)
        for name in GRU_RECURRENT_WEIGHTS:
            params[f"gru.{name}"] = orthogonal_init(hidden, rng, dtype)
        for name in GRU_BIASES:
            params[f"gru.{name}"] = np.zeros(hidden, dtype=dtype)
        params["dense.w"] = rng.normal(0.0, np.sqrt(2.0 / hidden), size=(1, hidden)).astype(dtype)
        params["dense.b"] = np.zeros(1, dtype=dtype)
        return cls(params, specs=specs, n_bins=n_bins, hidden=hidden, **kwargs)

    @classmethod
    def zeros(cls, specs=CONV_STACK, n_bins=enums.TRUNCATED_BINS, hidden=HIDDEN_SIZE, dtype=np.float32) -> "AutotunerNet":
        net = cls.initialize(np.random.default_rng(0), specs, n_bins, hidden, dtype)
        for value in net.params.values():
            value[...] = 0
        return net

    def _gru_input_size(self) -> int:
        channels, n_freq, _ = stack_output_shape(self.specs, self.n_bins, 64)
        return channels * n_freq

    def expected_shapes(self) -> Dict[str, Tuple[int, ...]]:
        shapes: Dict[str, Tuple[int, ...]] = {}
        for spec in self.specs:
            shapes[f"{spec.name}.w"] = (spec.out_channels, spec.in_channels, *spec.kernel)
            shapes[f"{spec.name}.b"] = (spec.out_channels,)
        for name in GRU_INPUT_WEIGHTS:
            shapes[f"gru.{name}"] = (self.hidden, self.gru_input)
        for name in GRU_RECURRENT_WEIGHTS:
            shapes[f"gru.{name}"] = (self.hidden, self.hidden)
        for name in GRU_BIASES:
            shapes[f"gru.{name}"] = (self.hidden,)
        shapes["dense.w"] = (1, self.hidden)
        shapes["dense.b"] = (1,)
        return shapes

    def _check_params(self) -> None:
        expected = self.expected_shapes()
        if set(expected) != set(self.params):
            raise ShapeError(f"parameter names differ: {sorted(set(expected) ^ set(self.params))}")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeError(f"{name}: expected shape {shape}, got {self.params[name].shape}")

    @property
    def dtype(self):
        return self.params["dense.w"].dtype

    def _gru_params(self) -> Params:
        return {name[4:]: value for name, value in self.params.items() if name.startswith("gru.")}

    def forward(self, x: np.ndarray, h0: np.ndarray) -> Tuple[float, np.ndarray, ForwardCache]:
        """
        Predict one note's shift.

        Args:
            x: ``(3, n_bins, T)`` note tensor
            h0: Hidden state carried from the previous note

        Returns:
            ``(shift, h_T, cache)``
        """
        if x.ndim != 3 or x.shape[:2] != (self.specs[0].in_channels, self.n_bins):
            raise ShapeError(f"expected ({self.specs[0].in_channels}, {self.n_bins}, T) input, got {x.shape}")
        if x.shape[2] < self.min_frames:
            raise DegenerateNoteError(f"note of {x.shape[2]} frames is shorter than {self.min_frames}")
        if h0.shape != (self.hidden,) or not np.all(np.isfinite(h0)):
            raise ShapeError(f"initial hidden state must be {self.hidden} finite values")

        cache = ForwardCache()
        out = x.astype(self.dtype, copy=False)
        last = len(self.specs) - 1
        for k, spec in enumerate(self.specs):
            out, conv_cache = conv2d_forward(out, spec, self.params[f"{spec.name}.w"], self.params[f"{spec.name}.b"])
            cache.conv.append(conv_cache)
            if k < last:
                out, mask = relu(out)
                cache.masks.append(mask)
        cache.conv_shape = out.shape
        if out.shape[2] < 1:
            raise DegenerateNoteError("time axis collapsed in the conv stack")

        sequence = out.reshape(-1, out.shape[2]).T
        h_last, cache.gru = gru_forward(sequence, h0.astype(self.dtype, copy=False), self._gru_params())
        cache.h_last = h_last
        y = dense_forward(h_last, self.params["dense.w"], self.params["dense.b"])
        return y, h_last, cache

    def predict(self, model_input: ModelInput, h0: np.ndarray) -> Tuple[float, np.ndarray]:
        """``net_forward``: shift in semitones and the carried hidden state."""
        y, h_last, _ = self.forward(model_input.tensor, h0)
        return y, h_last

    def backward(self, grad_y: float, cache: ForwardCache) -> Tuple[Params, np.ndarray]:
        """
        Parameter gradients for a scalar output gradient.

        The carried-in hidden state is treated as a constant; its gradient is
        returned only for checking.
        """
        if cache.h_last is None or not cache.conv:
            raise StateError("backward called before forward")
        grads: Params = {}
        grad_h, grads["dense.w"], grads["dense.b"] = dense_backward(grad_y, cache.h_last, self.params["dense.w"])
        grad_seq, grad_h0, gru_grads = gru_backward(grad_h.astype(self.dtype), cache.gru, self._gru_params())
        grads.update({f"gru.{name}": g for name, g in gru_grads.items()})

        grad = grad_seq.T.reshape(cache.conv_shape)
        last = len(self.specs) - 1
        for k in range(last, -1, -1):
            if k < last:
                grad = relu_backward(grad, cache.masks[k])
            spec = self.specs[k]
            grad, grads[f"{spec.name}.w"], grads[f"{spec.name}.b"] = conv2d_backward(grad, cache.conv[k])
        return grads, grad_h0

    def copy(self) -> "AutotunerNet":
        return AutotunerNet(
            {k: v.copy() for k, v in self.params.items()},
            specs=self.specs,
            n_bins=self.n_bins,
            hidden=self.hidden,
            min_frames=self.min_frames,
        )
