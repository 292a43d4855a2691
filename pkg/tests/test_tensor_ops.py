"""Fast tensor ops against the independent naive references."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srzoo.tensor import core, ops, reference

RNG = np.random.default_rng(0xC0FFEE)


def rand(shape, scale=1.0):
    return (RNG.standard_normal(shape) * scale).astype(np.float32)


# ------------------------------------------------------------- convolution

def _conv_case(case_rng):
    groups_pick = case_rng.choice(["one", "all"])
    cin_per_g = int(case_rng.integers(1, 4))
    if groups_pick == "one":
        groups = 1
        cin = cin_per_g
        cout = int(case_rng.integers(1, 5))
    else:
        groups = int(case_rng.integers(2, 5))
        cin = groups * cin_per_g
        cout = groups * int(case_rng.integers(1, 3))
    k = int(case_rng.choice([1, 2, 3]))
    stride = int(case_rng.choice([1, 2]))
    dilation = int(case_rng.choice([1, 2, 4]))
    pad_mode = str(case_rng.choice(["zero", "reflect"]))
    span = dilation * (k - 1) + 1
    h = int(case_rng.integers(span, span + 5))
    w = int(case_rng.integers(span, span + 5))
    # reflect padding needs pad <= size-1
    max_pad = min(2, h - 1, w - 1) if pad_mode == "reflect" else 2
    pad = int(case_rng.integers(0, max_pad + 1))
    has_bias = bool(case_rng.integers(0, 2))
    return core.ConvParams(
        in_channels=cin, out_channels=cout, kernel=(k, k), stride=stride,
        padding=(pad, pad), dilation=dilation, groups=groups, pad_mode=pad_mode,
        has_bias=has_bias,
    ), h, w


def test_conv2d_matches_direct_oracle_200_cases():
    case_rng = np.random.default_rng(20190811)
    done = 0
    while done < 200:
        params, h, w = _conv_case(case_rng)
        try:
            oh, ow = params.out_hw(h, w)
        except core.ShapeError:
            continue
        x = (case_rng.standard_normal((1, params.in_channels, h, w)) * 2).astype(np.float32)
        wgt = (case_rng.standard_normal(params.weight_shape) * 0.5).astype(np.float32)
        bias = None
        if params.has_bias:
            bias = case_rng.standard_normal(params.out_channels).astype(np.float32)
        fast = ops.conv2d(x, params, wgt, bias)
        slow = reference.conv2d_direct(x, params, wgt, bias)
        assert fast.shape == slow.shape == (1, params.out_channels, oh, ow)
        np.testing.assert_allclose(fast, slow, atol=1e-5, rtol=0)
        done += 1


def test_conv2d_known_values():
    # 1x1x3x3 input, 3x3 kernel of ones, zero pad: pure sum
    x = np.arange(9, dtype=np.float32).reshape(1, 1, 3, 3)
    p = core.ConvParams(1, 1, (3, 3), has_bias=False)
    w = np.ones((1, 1, 3, 3), np.float32)
    y = ops.conv2d(x, p, w)
    assert y.shape == (1, 1, 1, 1)
    assert y[0, 0, 0, 0] == 36.0

    # identity kernel with pad 1 keeps the map
    p1 = core.ConvParams(1, 1, (3, 3), padding=(1, 1), has_bias=False)
    ident = np.zeros((1, 1, 3, 3), np.float32)
    ident[0, 0, 1, 1] = 1.0
    np.testing.assert_array_equal(ops.conv2d(x, p1, ident), x)


def test_conv2d_grouped_is_blockwise():
    x = rand((2, 4, 6, 6))
    p = core.ConvParams(4, 4, (3, 3), padding=(1, 1), groups=2, has_bias=False)
    w = rand(p.weight_shape)
    full = ops.conv2d(x, p, w)
    # compute each half independently with groups=1
    ph = core.ConvParams(2, 2, (3, 3), padding=(1, 1), has_bias=False)
    lo = ops.conv2d(x[:, :2], ph, w[:2])
    hi = ops.conv2d(x[:, 2:], ph, w[2:])
    np.testing.assert_allclose(full, np.concatenate([lo, hi], axis=1), atol=1e-6)


def test_conv_param_validation():
    with pytest.raises(core.ShapeError):
        core.ConvParams(4, 4, (3, 3), groups=3)  # does not divide
    with pytest.raises(core.ShapeError):
        core.ConvParams(0, 4, (3, 3))
    with pytest.raises(core.ShapeError):
        core.ConvParams(4, 4, (3, 3), pad_mode="wrap")
    p = core.ConvParams(4, 8, (3, 3), groups=4)
    assert p.weight_shape == (8, 1, 3, 3)
    assert p.param_count == 8 * 1 * 9 + 8
    assert core.ConvParams(4, 8, (3, 3), groups=4, has_bias=False).param_count == 72


def test_conv_bias_contract_enforced():
    x = rand((1, 2, 4, 4))
    p = core.ConvParams(2, 2, (1, 1), has_bias=True)
    w = rand(p.weight_shape)
    with pytest.raises(core.ShapeError):
        ops.conv2d(x, p, w, None)  # bias promised but missing
    p0 = core.ConvParams(2, 2, (1, 1), has_bias=False)
    with pytest.raises(core.ShapeError):
        ops.conv2d(x, p0, rand(p0.weight_shape), rand((2,)))


def test_reflect_pad_limits():
    x = rand((1, 1, 3, 3))
    padded = core.pad_input(x, (2, 2), "reflect")
    assert padded.shape == (1, 1, 7, 7)
    with pytest.raises(core.ShapeError):
        core.pad_input(x, (3, 3), "reflect")  # pad must be <= size-1


def test_same_padding_preserves_size():
    for k, d in (((3, 3), 1), ((5, 5), 1), ((3, 3), 2), ((7, 7), 1)):
        pad = core.same_padding(k, d)
        p = core.ConvParams(1, 1, k, padding=pad, dilation=d, has_bias=False)
        assert p.out_hw(12, 9) == (12, 9)
    with pytest.raises(core.ShapeError):
        core.same_padding((2, 2))


# ------------------------------------------------------------- activations

def test_activation_definitions():
    x = np.array([-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0], np.float32).reshape(1, 1, 1, 7)
    relu = ops.activation(x, "relu")
    assert (relu >= 0).all() and relu[0, 0, 0, 4] == 1.0
    lrelu = ops.activation(x, "leaky_relu", alpha=0.2)
    assert lrelu[0, 0, 0, 1] == pytest.approx(-0.6)
    sig = ops.activation(x, "sigmoid")
    assert sig[0, 0, 0, 3] == pytest.approx(0.5)
    hsig = ops.activation(x, "h_sigmoid")
    assert hsig[0, 0, 0, 0] == 0.0 and hsig[0, 0, 0, 6] == 1.0
    assert hsig[0, 0, 0, 3] == pytest.approx(0.5)
    hsw = ops.activation(x, "h_swish")
    np.testing.assert_allclose(hsw, x * hsig, atol=1e-6)
    with pytest.raises(core.ShapeError):
        ops.activation(x, "gelu")


def test_sigmoid_extreme_values_stable():
    x = np.array([-500.0, 500.0], np.float32).reshape(1, 1, 1, 2)
    y = ops.activation(x, "sigmoid")
    assert np.isfinite(y).all()
    assert y[0, 0, 0, 0] == pytest.approx(0.0, abs=1e-7)
    assert y[0, 0, 0, 1] == pytest.approx(1.0, abs=1e-7)


# ----------------------------------------------------------- pixel shuffle

def test_pixel_shuffle_matches_reference_and_roundtrips():
    x = rand((2, 12, 3, 5))
    fast = ops.pixel_shuffle(x, 2)
    slow = reference.pixel_shuffle_direct(x, 2)
    np.testing.assert_array_equal(fast, slow)
    assert fast.shape == (2, 3, 6, 10)
    back = ops.pixel_unshuffle(fast, 2)
    np.testing.assert_array_equal(back, x)  # bitwise


def test_pixel_shuffle_channel_requirement():
    with pytest.raises(core.ShapeError):
        ops.pixel_shuffle(rand((1, 7, 2, 2)), 2)


# ------------------------------------------------------------------ resize

@pytest.mark.parametrize("mode", ["bilinear", "bicubic"])
@pytest.mark.parametrize(
    "scale,antialias", [(4, False), (2, False), (0.5, True), (0.25, True), (1.5, False)]
)
def test_resize_matches_direct_oracle(mode, scale, antialias):
    x = rand((1, 2, 8, 9), scale=3.0)
    fast = ops.resize(x, scale, mode=mode, antialias=antialias)
    slow = reference.resize_direct(x, scale, mode=mode, antialias=antialias)
    assert fast.shape == slow.shape
    np.testing.assert_allclose(fast, slow, atol=1e-5, rtol=0)


def test_resize_constant_preserved_exactly():
    x = np.full((1, 3, 8, 8), 87.0, np.float32)
    for mode in ("bilinear", "bicubic"):
        for scale, aa in ((4, False), (0.25, True)):
            y = ops.resize(x, scale, mode=mode, antialias=aa)
            np.testing.assert_allclose(y, 87.0, atol=1e-4)


def test_resize_scale_one_identity():
    x = rand((1, 3, 7, 5))
    np.testing.assert_array_equal(ops.resize(x, 1, mode="bilinear"), x)


def test_resize_output_sizes_ceil():
    assert ops.resize_out_size(10, 0.25) == 3  # ceil(2.5)
    assert ops.resize_out_size(8, 0.25) == 2
    assert ops.resize_out_size(5, 4) == 20
    x = rand((1, 1, 10, 10))
    assert ops.resize(x, 0.25, mode="bicubic", antialias=True).shape == (1, 1, 3, 3)


def test_resize_linear_ramp_half_pixel():
    # bilinear x2 of a linear ramp stays linear in the interior
    base = np.arange(8, dtype=np.float32)
    x = np.tile(base, (1, 1, 8, 1))
    y = ops.resize(x, 2, mode="bilinear")
    inner = y[0, 0, 4, 2:-2]
    diffs = np.diff(inner)
    np.testing.assert_allclose(diffs, 0.5, atol=1e-5)


def test_resize_align_corners_endpoints():
    x = np.array([0.0, 3.0], np.float32).reshape(1, 1, 1, 2)
    y = ops.resize(x, 2, mode="bilinear", align_corners=True)
    np.testing.assert_allclose(y[0, 0, 0], [0.0, 1.0, 2.0, 3.0], atol=1e-6)


def test_resize_rejects_bad_args():
    x = rand((1, 1, 4, 4))
    with pytest.raises(core.ShapeError):
        ops.resize(x, 0)
    with pytest.raises(core.ShapeError):
        ops.resize(x, 2, mode="nearest")


# ------------------------------------------------- pooling, concat, split

def test_global_avg_pool_matches_reference():
    x = rand((2, 5, 4, 6))
    fast = ops.global_avg_pool(x)
    slow = reference.global_avg_pool_direct(x)
    assert fast.shape == (2, 5, 1, 1)
    np.testing.assert_allclose(fast, slow, atol=1e-6)


def test_concat_split_roundtrip():
    a, b, c = rand((1, 3, 4, 4)), rand((1, 5, 4, 4)), rand((1, 2, 4, 4))
    cat = ops.concat_channels([a, b, c])
    assert cat.shape == (1, 10, 4, 4)
    pa, pb, pc = ops.split_channels(cat, (3, 5, 2))
    for got, want in ((pa, a), (pb, b), (pc, c)):
        np.testing.assert_array_equal(got, want)
    with pytest.raises(core.ShapeError):
        ops.split_channels(cat, (3, 3))  # sizes must cover all channels
    with pytest.raises(core.ShapeError):
        ops.concat_channels([a, rand((1, 3, 5, 4))])


# ------------------------------------------------------------ elementwise

def test_elementwise_add_mul_and_gate_broadcast():
    x = rand((2, 4, 3, 3))
    y = rand((2, 4, 3, 3))
    np.testing.assert_allclose(ops.elementwise(x, y, "add"), x + y, atol=1e-6)
    np.testing.assert_allclose(ops.elementwise(x, y, "mul"), x * y, atol=1e-6)
    gate = rand((2, 4, 1, 1))
    np.testing.assert_allclose(ops.elementwise(x, gate, "mul"), x * gate, atol=1e-6)
    np.testing.assert_allclose(ops.elementwise(x, 0.5, "mul"), x * 0.5, atol=1e-6)
    with pytest.raises(core.ShapeError):
        ops.elementwise(x, rand((2, 4, 3, 1)), "add")
    with pytest.raises(core.ShapeError):
        ops.elementwise(x, y, "sub")


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 3), st.integers(1, 4), st.integers(1, 5), st.integers(1, 5),
    st.sampled_from(["add", "mul"]),
)
def test_elementwise_commutes(n, c, h, w, op):
    g = np.random.default_rng(n * 1000 + c * 100 + h * 10 + w)
    a = g.standard_normal((n, c, h, w)).astype(np.float32)
    b = g.standard_normal((n, c, h, w)).astype(np.float32)
    np.testing.assert_array_equal(ops.elementwise(a, b, op), ops.elementwise(b, a, op))


def test_as_nchw_rejects_wrong_rank():
    with pytest.raises(core.ShapeError):
        core.as_nchw(np.zeros((3, 4, 4), np.float32))
