"""Slow, direct implementations used as the reference route for every fast op.

Each function here is written as a literal transcription of the operation's
definition (explicit loops over output elements, full kernel summation) and
deliberately shares no machinery with the vectorized versions in ops.py.
They exist so the fast paths can always be cross-checked on small shapes.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ConvParams, as_nchw, check_conv_weight, pad_input


def conv2d_direct(
    x: np.ndarray,
    params: ConvParams,
    weight: np.ndarray,
    bias: np.ndarray | None = None,
) -> np.ndarray:
    """Nested-loop 2-d convolution (cross-correlation), float64 accumulation."""
    x = as_nchw(x)
    check_conv_weight(params, weight, bias)
    n, cin, h, w = x.shape
    if cin != params.in_channels:
        raise_shape = f"input has {cin} channels, conv expects {params.in_channels}"
        raise ValueError(raise_shape)
    oh, ow = params.out_hw(h, w)
    kh, kw = params.kernel
    s, d, g = params.stride, params.dilation, params.groups
    cin_g = params.in_channels // g
    cout_g = params.out_channels // g

    xp = pad_input(x, params.padding, params.pad_mode).astype(np.float64)
    wt = weight.astype(np.float64)
    out = np.zeros((n, params.out_channels, oh, ow), dtype=np.float64)
    for b in range(n):
        for co in range(params.out_channels):
            grp = co // cout_g
            for oy in range(oh):
                for ox in range(ow):
                    acc = 0.0
                    for ci in range(cin_g):
                        for ky in range(kh):
                            for kx in range(kw):
                                iy = oy * s + ky * d
                                ix = ox * s + kx * d
                                acc += (
                                    xp[b, grp * cin_g + ci, iy, ix]
                                    * wt[co, ci, ky, kx]
                                )
                    out[b, co, oy, ox] = acc
    if bias is not None:
        out += bias.astype(np.float64)[None, :, None, None]
    return out.astype(np.float32)


def _kernel_value(mode: str, t: float) -> float:
    at = abs(t)
    if mode == "bilinear":
        return 1.0 - at if at < 1.0 else 0.0
    if mode == "bicubic":
        # Keys cubic, a = -0.5
        a = -0.5
        if at <= 1.0:
            return (a + 2.0) * at**3 - (a + 3.0) * at**2 + 1.0
        if at < 2.0:
            return a * at**3 - 5.0 * a * at**2 + 8.0 * a * at - 4.0 * a
        return 0.0
    raise ValueError(f"unknown resize mode {mode!r}")


def _axis_taps(
    out_size: int,
    in_size: int,
    scale: float,
    mode: str,
    antialias: bool,
    align_corners: bool,
) -> list[tuple[list[int], list[float]]]:
    """Per output index: clamped source indices and normalized kernel weights."""
    base_support = 1.0 if mode == "bilinear" else 2.0
    kscale = 1.0
    if antialias and scale < 1.0:
        kscale = scale
    support = base_support / kscale
    taps = []
    for i in range(out_size):
        if align_corners and out_size > 1:
            u = i * (in_size - 1) / (out_size - 1)
        else:
            u = (i + 0.5) / scale - 0.5
        lo = math.floor(u - support) + 1
        hi = math.floor(u + support)
        idx, wts = [], []
        for j in range(lo, hi + 1):
            wv = _kernel_value(mode, (u - j) * kscale) * kscale
            idx.append(min(max(j, 0), in_size - 1))
            wts.append(wv)
        total = sum(wts)
        if total == 0.0:
            idx, wts = [min(max(round(u), 0), in_size - 1)], [1.0]
            total = 1.0
        wts = [wv / total for wv in wts]
        taps.append((idx, wts))
    return taps


def resize_direct(
    x: np.ndarray,
    scale: float,
    mode: str = "bilinear",
    antialias: bool = False,
    align_corners: bool = False,
) -> np.ndarray:
    """Full 2-d kernel summation resize (non-separable evaluation)."""
    x = as_nchw(x)
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    n, c, h, w = x.shape
    oh = math.ceil(h * scale)
    ow = math.ceil(w * scale)
    ty = _axis_taps(oh, h, scale, mode, antialias, align_corners)
    tx = _axis_taps(ow, w, scale, mode, antialias, align_corners)
    xd = x.astype(np.float64)
    out = np.zeros((n, c, oh, ow), dtype=np.float64)
    for b in range(n):
        for ch in range(c):
            for oy in range(oh):
                iy, wy = ty[oy]
                for ox in range(ow):
                    ix, wx = tx[ox]
                    acc = 0.0
                    for jy, vy in zip(iy, wy):
                        for jx, vx in zip(ix, wx):
                            acc += vy * vx * xd[b, ch, jy, jx]
                    out[b, ch, oy, ox] = acc
    return out.astype(np.float32)


def pixel_shuffle_direct(x: np.ndarray, r: int) -> np.ndarray:
    """Index-by-index sub-pixel rearrangement, c*r^2 -> c, (h, w) -> (h*r, w*r)."""
    x = as_nchw(x)
    n, c, h, w = x.shape
    if r < 1:
        raise ValueError(f"upscale factor must be >= 1, got {r}")
    if c % (r * r):
        raise ValueError(f"channels {c} not divisible by r^2 = {r * r}")
    co = c // (r * r)
    out = np.zeros((n, co, h * r, w * r), dtype=np.float32)
    for b in range(n):
        for ch in range(co):
            for y in range(h):
                for x_ in range(w):
                    for dy in range(r):
                        for dx in range(r):
                            out[b, ch, y * r + dy, x_ * r + dx] = x[
                                b, ch * r * r + dy * r + dx, y, x_
                            ]
    return out


def global_avg_pool_direct(x: np.ndarray) -> np.ndarray:
    x = as_nchw(x)
    n, c, h, w = x.shape
    out = np.zeros((n, c, 1, 1), dtype=np.float64)
    for b in range(n):
        for ch in range(c):
            acc = 0.0
            for y in range(h):
                for z in range(w):
                    acc += float(x[b, ch, y, z])
            out[b, ch, 0, 0] = acc / (h * w)
    return out.astype(np.float32)
