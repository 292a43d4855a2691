"""Vectorized NCHW tensor operations.

conv2d gathers kernel taps into an im2col buffer and reduces with a single
matmul per group; partial sums are carried in float64 and cast to float32
once at the end. resize is separable (rows then columns) with per-output
normalized kernel weights, half-pixel source mapping by default, and
replicate edge handling; antialiasing widens the kernel by 1/scale on
downscale. Every op here has a direct counterpart in reference.py.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import ConvParams, ShapeError, as_nchw, check_conv_weight, pad_input

ACTIVATIONS = ("relu", "leaky_relu", "sigmoid", "h_sigmoid", "h_swish")
RESIZE_MODES = ("bilinear", "bicubic")


def conv2d(
    x: np.ndarray,
    params: ConvParams,
    weight: np.ndarray,
    bias: np.ndarray | None = None,
) -> np.ndarray:
    x = as_nchw(x)
    check_conv_weight(params, weight, bias)
    n, cin, h, w = x.shape
    if cin != params.in_channels:
        raise ShapeError(f"input has {cin} channels, conv expects {params.in_channels}")
    oh, ow = params.out_hw(h, w)
    kh, kw = params.kernel
    s, d, g = params.stride, params.dilation, params.groups
    cin_g = cin // g
    cout_g = params.out_channels // g

    xp = pad_input(x, params.padding, params.pad_mode).astype(np.float64)
    # col[b, c, ky, kx, oy, ox] = xp[b, c, oy*s + ky*d, ox*s + kx*d]
    col = np.empty((n, cin, kh, kw, oh, ow), dtype=np.float64)
    for ky in range(kh):
        y0 = ky * d
        for kx in range(kw):
            x0 = kx * d
            col[:, :, ky, kx] = xp[
                :, :, y0 : y0 + (oh - 1) * s + 1 : s, x0 : x0 + (ow - 1) * s + 1 : s
            ]
    col = col.reshape(n, g, cin_g * kh * kw, oh * ow)
    wt = weight.astype(np.float64).reshape(g, cout_g, cin_g * kh * kw)
    out = np.empty((n, g, cout_g, oh * ow), dtype=np.float64)
    for gi in range(g):
        out[:, gi] = wt[gi] @ col[:, gi]
    out = out.reshape(n, params.out_channels, oh, ow)
    if bias is not None:
        out += bias.astype(np.float64)[None, :, None, None]
    return np.ascontiguousarray(out.astype(np.float32))


def activation(x: np.ndarray, kind: str, alpha: float = 0.2) -> np.ndarray:
    x = as_nchw(x)
    if kind == "relu":
        return np.maximum(x, 0.0).astype(np.float32)
    if kind == "leaky_relu":
        return np.where(x >= 0.0, x, np.float32(alpha) * x).astype(np.float32)
    if kind == "sigmoid":
        xd = x.astype(np.float64)
        with np.errstate(over="ignore"):
            pos = 1.0 / (1.0 + np.exp(-xd))
            ez = np.exp(np.minimum(xd, 0.0))
            neg = ez / (1.0 + ez)
        return np.where(xd >= 0.0, pos, neg).astype(np.float32)
    if kind == "h_sigmoid":
        return (np.clip(x + 3.0, 0.0, 6.0) / 6.0).astype(np.float32)
    if kind == "h_swish":
        return (x * (np.clip(x + 3.0, 0.0, 6.0) / 6.0)).astype(np.float32)
    raise ShapeError(f"unknown activation {kind!r}, expected one of {ACTIVATIONS}")


def pixel_shuffle(x: np.ndarray, r: int) -> np.ndarray:
    """(n, c*r^2, h, w) -> (n, c, h*r, w*r); inverse of pixel_unshuffle."""
    x = as_nchw(x)
    n, c, h, w = x.shape
    if r < 1:
        raise ShapeError(f"upscale factor must be >= 1, got {r}")
    if c % (r * r):
        raise ShapeError(f"channels {c} not divisible by r^2 = {r * r}")
    co = c // (r * r)
    out = x.reshape(n, co, r, r, h, w).transpose(0, 1, 4, 2, 5, 3)
    return np.ascontiguousarray(out.reshape(n, co, h * r, w * r))


def pixel_unshuffle(x: np.ndarray, r: int) -> np.ndarray:
    """(n, c, h*r, w*r) -> (n, c*r^2, h, w); inverse of pixel_shuffle."""
    x = as_nchw(x)
    n, c, h, w = x.shape
    if r < 1:
        raise ShapeError(f"downscale factor must be >= 1, got {r}")
    if h % r or w % r:
        raise ShapeError(f"spatial dims {h}x{w} not divisible by r = {r}")
    ho, wo = h // r, w // r
    out = x.reshape(n, c, ho, r, wo, r).transpose(0, 1, 3, 5, 2, 4)
    return np.ascontiguousarray(out.reshape(n, c * r * r, ho, wo))


def _cubic_keys(t: np.ndarray) -> np.ndarray:
    a = -0.5
    at = np.abs(t)
    at2 = at * at
    at3 = at2 * at
    inner = (a + 2.0) * at3 - (a + 3.0) * at2 + 1.0
    outer = a * at3 - 5.0 * a * at2 + 8.0 * a * at - 4.0 * a
    return np.where(at <= 1.0, inner, np.where(at < 2.0, outer, 0.0))


def _triangle(t: np.ndarray) -> np.ndarray:
    at = np.abs(t)
    return np.where(at < 1.0, 1.0 - at, 0.0)


def resize_out_size(size: int, scale: Fraction | float) -> int:
    if isinstance(scale, Fraction):
        return math.ceil(size * scale)
    return math.ceil(size * float(scale) - 1e-12)


def _weight_matrix(
    out_size: int,
    in_size: int,
    scale: float,
    mode: str,
    antialias: bool,
    align_corners: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Tap index matrix (out, taps) with indices clamped, and weights."""
    kernel = _triangle if mode == "bilinear" else _cubic_keys
    base_support = 1.0 if mode == "bilinear" else 2.0
    kscale = scale if (antialias and scale < 1.0) else 1.0
    support = base_support / kscale
    i = np.arange(out_size, dtype=np.float64)
    if align_corners and out_size > 1:
        u = i * (in_size - 1) / (out_size - 1)
    else:
        u = (i + 0.5) / scale - 0.5
    lo = np.floor(u - support).astype(np.int64) + 1
    ntaps = int(math.ceil(2.0 * support))
    offs = np.arange(ntaps, dtype=np.int64)
    idx = lo[:, None] + offs[None, :]
    wts = kernel((u[:, None] - idx) * kscale) * kscale
    idx = np.clip(idx, 0, in_size - 1)
    totals = wts.sum(axis=1, keepdims=True)
    degenerate = totals[:, 0] == 0.0
    if degenerate.any():
        wts[degenerate] = 0.0
        wts[degenerate, 0] = 1.0
        idx[degenerate, 0] = np.clip(np.rint(u[degenerate]).astype(np.int64), 0, in_size - 1)
        totals = wts.sum(axis=1, keepdims=True)
    wts = wts / totals
    return idx, wts


def resize(
    x: np.ndarray,
    scale: Fraction | float,
    mode: str = "bilinear",
    antialias: bool = False,
    align_corners: bool = False,
) -> np.ndarray:
    """Separable image rescale with replicate edges.

    Output size is ceil(in * scale) per axis. Kernel weights are
    renormalized per output pixel, so constant inputs stay constant.
    """
    x = as_nchw(x)
    fscale = float(scale)
    if fscale <= 0.0:
        raise ShapeError(f"scale must be positive, got {scale}")
    if mode not in RESIZE_MODES:
        raise ShapeError(f"unknown resize mode {mode!r}, expected one of {RESIZE_MODES}")
    n, c, h, w = x.shape
    oh = resize_out_size(h, scale)
    ow = resize_out_size(w, scale)
    xd = x.astype(np.float64)
    iy, wy = _weight_matrix(oh, h, fscale, mode, antialias, align_corners)
    gy = xd[:, :, iy, :]  # (n, c, oh, taps, w)
    tmp = np.einsum("bcotw,ot->bcow", gy, wy, optimize=True)
    ix, wx = _weight_matrix(ow, w, fscale, mode, antialias, align_corners)
    gw = tmp[:, :, :, ix]  # (n, c, oh, ow, taps)
    out = np.einsum("bchot,ot->bcho", gw, wx, optimize=True)
    return np.ascontiguousarray(out.astype(np.float32))


def global_avg_pool(x: np.ndarray) -> np.ndarray:
    x = as_nchw(x)
    return x.astype(np.float64).mean(axis=(2, 3), keepdims=True).astype(np.float32)


def concat_channels(parts: list[np.ndarray]) -> np.ndarray:
    if not parts:
        raise ShapeError("concat needs at least one input")
    parts = [as_nchw(p, f"concat input {i}") for i, p in enumerate(parts)]
    ref = parts[0].shape
    for i, p in enumerate(parts[1:], start=1):
        if p.shape[0] != ref[0] or p.shape[2:] != ref[2:]:
            raise ShapeError(
                f"concat input {i} has shape {p.shape}, incompatible with {ref} "
                "(batch and spatial dims must match)"
            )
    return np.ascontiguousarray(np.concatenate(parts, axis=1))


def split_channels(x: np.ndarray, sizes: tuple[int, ...]) -> list[np.ndarray]:
    x = as_nchw(x)
    if any(s < 1 for s in sizes):
        raise ShapeError(f"split sizes must be positive, got {sizes}")
    if sum(sizes) != x.shape[1]:
        raise ShapeError(f"split sizes {sizes} must sum to channel count {x.shape[1]}")
    out = []
    at = 0
    for s in sizes:
        out.append(np.ascontiguousarray(x[:, at : at + s]))
        at += s
    return out


def _broadcastable(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    if a == b:
        return True
    # allow (n, c, 1, 1) against (n, c, h, w) in either order (channel gates)
    if a[:2] == b[:2]:
        return (a[2], a[3]) == (1, 1) or (b[2], b[3]) == (1, 1)
    return False


def elementwise(a: np.ndarray, b: np.ndarray | float, op: str) -> np.ndarray:
    """Pointwise add/mul. b may be a scalar or a (n, c, 1, 1) channel gate."""
    a = as_nchw(a, "elementwise lhs")
    if np.isscalar(b):
        bv = np.float32(b)
    else:
        bv = as_nchw(b, "elementwise rhs")
        if not _broadcastable(a.shape, bv.shape):
            raise ShapeError(
                f"elementwise operands {a.shape} and {bv.shape} are neither equal "
                "nor (n, c, 1, 1)-broadcastable"
            )
    if op == "add":
        return np.ascontiguousarray((a + bv).astype(np.float32))
    if op == "mul":
        return np.ascontiguousarray((a * bv).astype(np.float32))
    raise ShapeError(f"unknown elementwise op {op!r}, expected 'add' or 'mul'")
