"""
Tests for the conv, GRU and dense primitives.

Gradients are checked against central differences at 64-bit.
"""

import numpy as np
import pytest

from src.core.exceptions import ShapeError, StateError
from src.services.network.layers import (
    CONV_STACK,
    ConvLayerSpec,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    gru_backward,
    gru_forward,
    stack_output_shape,
)

EPS = 1e-6


def numeric_grad(f, x):
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = x[i]
        x[i] = old + EPS
        up = f()
        x[i] = old - EPS
        down = f()
        x[i] = old
        grad[i] = (up - down) / (2 * EPS)
    return grad


def assert_close(analytic, numeric):
    rel = np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    assert np.max(rel) < 1e-4


def test_table_1_shape_chain():
    shapes = []
    n_freq, n_time = 1024, 100
    for spec in CONV_STACK:
        n_freq, n_time = spec.output_shape(n_freq, n_time)
        shapes.append((spec.out_channels, n_freq, n_time))
    assert shapes == [
        (128, 1024, 50),
        (64, 1024, 25),
        (64, 512, 13),
        (64, 512, 13),
        (8, 513, 15),
        (1, 513, 15),
    ]
    assert stack_output_shape(CONV_STACK, 1024, 100) == (1, 513, 15)


def test_conv_spec_round_trips_through_dict():
    for spec in CONV_STACK:
        assert ConvLayerSpec.from_dict(spec.to_dict()) == spec


def test_conv_gradients():
    rng = np.random.default_rng(0)
    spec = ConvLayerSpec("c", 2, 3, (3, 2), (2, 1), (1, 1))
    x = rng.normal(size=(2, 5, 6))
    w = rng.normal(size=(3, 2, 3, 2))
    b = rng.normal(size=3)
    out, cache = conv2d_forward(x, spec, w, b)
    assert out.shape == (3, *spec.output_shape(5, 6))
    g = rng.normal(size=out.shape)

    def loss():
        return float(np.sum(conv2d_forward(x, spec, w, b)[0] * g))

    grad_x, grad_w, grad_b = conv2d_backward(g, cache)
    assert_close(grad_x, numeric_grad(loss, x))
    assert_close(grad_w, numeric_grad(loss, w))
    assert_close(grad_b, numeric_grad(loss, b))


def test_conv_matches_a_direct_sum():
    rng = np.random.default_rng(1)
    spec = ConvLayerSpec("c", 1, 1, (2, 2))
    x = rng.normal(size=(1, 3, 3))
    w = rng.normal(size=(1, 1, 2, 2))
    out, _ = conv2d_forward(x, spec, w, np.zeros(1))
    expected = np.array(
        [[np.sum(x[0, i : i + 2, j : j + 2] * w[0, 0]) for j in range(2)] for i in range(2)]
    )
    np.testing.assert_allclose(out[0], expected)


def test_gru_gradients():
    rng = np.random.default_rng(2)
    hidden, n_in, steps = 3, 4, 5
    params = {}
    for gate in "zrh":
        params[f"W_{gate}"] = rng.normal(size=(hidden, n_in))
        params[f"U_{gate}"] = rng.normal(size=(hidden, hidden))
        params[f"b_{gate}"] = rng.normal(size=hidden)
    xs = rng.normal(size=(steps, n_in))
    h0 = rng.normal(size=hidden)
    g = rng.normal(size=hidden)

    def loss():
        return float(gru_forward(xs, h0, params)[0] @ g)

    h_last, caches = gru_forward(xs, h0, params)
    assert h_last.shape == (hidden,)
    grad_xs, grad_h0, grads = gru_backward(g, caches, params)
    assert_close(grad_xs, numeric_grad(loss, xs))
    assert_close(grad_h0, numeric_grad(loss, h0))
    for name, value in params.items():
        assert_close(grads[name], numeric_grad(loss, value))


def test_dense_gradients():
    rng = np.random.default_rng(3)
    h = rng.normal(size=4)
    w = rng.normal(size=(1, 4))
    b = rng.normal(size=1)
    assert dense_forward(h, w, b) == pytest.approx(float(w[0] @ h + b[0]))
    grad_h, grad_w, grad_b = dense_backward(2.0, h, w)
    np.testing.assert_allclose(grad_h, 2.0 * w[0])
    np.testing.assert_allclose(grad_w, 2.0 * h[np.newaxis, :])
    np.testing.assert_allclose(grad_b, [2.0])


def test_bad_shapes_and_missing_caches():
    spec = ConvLayerSpec("c", 2, 1, (3, 3))
    w, b = np.zeros((1, 2, 3, 3)), np.zeros(1)
    with pytest.raises(ShapeError):
        conv2d_forward(np.zeros((3, 5, 5)), spec, w, b)
    with pytest.raises(ShapeError):
        conv2d_forward(np.zeros((2, 2, 2)), spec, w, b)
    with pytest.raises(StateError):
        conv2d_backward(np.zeros((1, 3, 3)), None)
    with pytest.raises(StateError):
        gru_backward(np.zeros(3), [], {})
