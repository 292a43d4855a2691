"""Graph execution: end-to-end forward passes and error context."""

import numpy as np
import pytest

from srzoo.ir import executor, weights as W
from srzoo.ir.graph import Graph, LayerSpec
from srzoo.tensor import ConvParams, ops
from srzoo.zoo import REGISTRY, build_model

RNG = np.random.default_rng(515)


def test_identity_conv_forward():
    g = Graph(
        name="ident",
        nodes=(
            LayerSpec(id="x", kind="input"),
            LayerSpec(id="c", kind="conv", inputs=("x",),
                      conv=ConvParams(3, 3, (1, 1), has_bias=False)),
        ),
        output="c",
    )
    store = W.init_weights(g, scheme="constant:0")
    eye = np.zeros((3, 3, 1, 1), np.float32)
    for i in range(3):
        eye[i, i, 0, 0] = 1.0
    store["c.weight"] = eye
    x = RNG.standard_normal((2, 3, 5, 5)).astype(np.float32)
    np.testing.assert_allclose(executor.forward(g, store, x), x, atol=1e-7)


def test_zero_body_msrresnet_equals_bilinear_skip():
    """With every weight zero the residual trunk is silent and the model
    reduces to its bilinear x4 skip path."""
    g = build_model("msrresnet", {"blocks": 2})
    store = W.init_weights(g, scheme="constant:0")
    x = RNG.uniform(0, 1, (1, 3, 12, 12)).astype(np.float32)
    got = executor.forward(g, store, x)
    want = ops.resize(x, 4, mode="bilinear")
    assert got.shape == (1, 3, 48, 48)
    np.testing.assert_allclose(got, want, atol=1e-5)


@pytest.mark.parametrize("arch_id", sorted(REGISTRY))
def test_every_builder_runs_x4(arch_id):
    g = build_model(arch_id)
    store = W.init_weights(g, seed=1)
    x = RNG.uniform(0, 1, (1, 3, 12, 12)).astype(np.float32)
    y = executor.forward(g, store, x)
    assert y.shape == (1, 3, 48, 48)
    assert np.isfinite(y).all()


def test_forward_error_names_failing_node():
    g = Graph(
        name="bad",
        nodes=(
            LayerSpec(id="x", kind="input"),
            LayerSpec(id="narrow", kind="conv", inputs=("x",),
                      conv=ConvParams(8, 8, (3, 3))),
        ),
        output="narrow",
    )
    store = W.init_weights(g, seed=0)
    x = np.zeros((1, 3, 6, 6), np.float32)
    with pytest.raises(executor.GraphExecutionError, match="node 'narrow'"):
        executor.forward(g, store, x)


def test_forward_check_rejects_foreign_store():
    g = build_model("msrresnet", {"blocks": 1})
    other = W.init_weights(build_model("msrresnet", {"blocks": 2}), seed=0)
    x = np.zeros((1, 3, 8, 8), np.float32)
    with pytest.raises(W.WeightMismatchError):
        executor.forward(g, other, x)


def test_forward_deterministic():
    g = build_model("imdn")
    store = W.init_weights(g, seed=9)
    x = RNG.uniform(0, 1, (1, 3, 10, 10)).astype(np.float32)
    a = executor.forward(g, store, x)
    b = executor.forward(g, store, x)
    np.testing.assert_array_equal(a, b)


def test_shared_weights_actually_reused():
    """A two-conv recurrent chain with shared slots must equal applying the
    same conv twice."""
    p = ConvParams(4, 4, (3, 3), padding=(1, 1))
    g = Graph(
        name="rec",
        nodes=(
            LayerSpec(id="x", kind="input"),
            LayerSpec(id="a", kind="conv", inputs=("x",), conv=p),
            LayerSpec(id="b", kind="conv", inputs=("a",), conv=p),
        ),
        output="b",
        shared_groups=(("a", "b"),),
    )
    store = W.init_weights(g, seed=5)
    x = RNG.standard_normal((1, 4, 6, 6)).astype(np.float32)
    once = ops.conv2d(x, p, store["a.weight"], store["a.bias"])
    twice = ops.conv2d(once, p, store["a.weight"], store["a.bias"])
    np.testing.assert_allclose(executor.forward(g, store, x), twice, atol=1e-6)
