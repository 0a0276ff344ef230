"""Numpy CNN+GRU shift regressor with manual gradients."""

from src.services.network.checkpoint import load_checkpoint, save_checkpoint
from src.services.network.layers import (
    CONV_STACK,
    ConvLayerSpec,
    conv2d_backward,
    conv2d_forward,
    gru_backward,
    gru_forward,
    gru_step,
    stack_output_shape,
)
from src.services.network.model import AutotunerNet, gru_hidden_init, he_init
from src.services.network.optim import AdamState, adam_step, cents_from_mse, clip_gradients, mse_loss

__all__ = [
    "CONV_STACK",
    "AdamState",
    "AutotunerNet",
    "ConvLayerSpec",
    "adam_step",
    "cents_from_mse",
    "clip_gradients",
    "conv2d_backward",
    "conv2d_forward",
    "gru_backward",
    "gru_forward",
    "gru_hidden_init",
    "gru_step",
    "he_init",
    "load_checkpoint",
    "mse_loss",
    "save_checkpoint",
    "stack_output_shape",
]
