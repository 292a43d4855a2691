"""Core value conventions and parameter records for the tensor operations.

Feature maps are plain numpy arrays in NCHW layout, float32, C-contiguous.
Weights are numpy float32 arrays whose rank depends on the consuming op
(conv: (out, in/groups, kh, kw); dense: (out, in); bias: (out,)).
All operations are pure functions: same inputs, bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAD_MODES = ("zero", "reflect")


class ShapeError(ValueError):
    """Raised when an array's shape or dtype violates an op's contract."""


def as_nchw(x: np.ndarray, what: str = "input") -> np.ndarray:
    """Validate and normalize a feature map to float32 C-contiguous NCHW."""
    arr = np.asarray(x)
    if arr.ndim != 4:
        raise ShapeError(f"{what} must be rank-4 (n, c, h, w), got rank {arr.ndim}")
    if any(d < 0 for d in arr.shape):
        raise ShapeError(f"{what} has a negative dimension: {arr.shape}")
    if arr.dtype != np.float32:
        arr = arr.astype(np.float32)
    return np.ascontiguousarray(arr)


@dataclass(frozen=True)
class ConvParams:
    """Static configuration of a 2-d convolution.

    padding is symmetric per axis, (pad_h, pad_w). pad_mode "reflect"
    mirrors about the edge sample without repeating it.
    """

    in_channels: int
    out_channels: int
    kernel: tuple[int, int] = (3, 3)
    stride: int = 1
    padding: tuple[int, int] = (0, 0)
    dilation: int = 1
    groups: int = 1
    pad_mode: str = "zero"
    has_bias: bool = True

    def __post_init__(self) -> None:
        if self.in_channels < 1 or self.out_channels < 1:
            raise ShapeError(
                f"channels must be positive, got in={self.in_channels} out={self.out_channels}"
            )
        kh, kw = self.kernel
        if kh < 1 or kw < 1:
            raise ShapeError(f"kernel dims must be positive, got {self.kernel}")
        if self.stride < 1:
            raise ShapeError(f"stride must be >= 1, got {self.stride}")
        if self.dilation < 1:
            raise ShapeError(f"dilation must be >= 1, got {self.dilation}")
        ph, pw = self.padding
        if ph < 0 or pw < 0:
            raise ShapeError(f"padding must be non-negative, got {self.padding}")
        if self.groups < 1:
            raise ShapeError(f"groups must be >= 1, got {self.groups}")
        if self.in_channels % self.groups or self.out_channels % self.groups:
            raise ShapeError(
                f"groups={self.groups} must divide in={self.in_channels} "
                f"and out={self.out_channels}"
            )
        if self.pad_mode not in PAD_MODES:
            raise ShapeError(f"pad_mode must be one of {PAD_MODES}, got {self.pad_mode!r}")

    @property
    def weight_shape(self) -> tuple[int, int, int, int]:
        kh, kw = self.kernel
        return (self.out_channels, self.in_channels // self.groups, kh, kw)

    @property
    def weight_count(self) -> int:
        out, cin, kh, kw = self.weight_shape
        return out * cin * kh * kw

    @property
    def param_count(self) -> int:
        return self.weight_count + (self.out_channels if self.has_bias else 0)

    def out_hw(self, h: int, w: int) -> tuple[int, int]:
        """Spatial output size; raises if the kernel does not fit."""
        kh, kw = self.kernel
        ph, pw = self.padding
        eff_kh = self.dilation * (kh - 1) + 1
        eff_kw = self.dilation * (kw - 1) + 1
        oh = (h + 2 * ph - eff_kh) // self.stride + 1
        ow = (w + 2 * pw - eff_kw) // self.stride + 1
        if oh < 1 or ow < 1:
            raise ShapeError(
                f"conv output would be empty: input {h}x{w}, effective kernel "
                f"{eff_kh}x{eff_kw}, padding {self.padding}, stride {self.stride}"
            )
        return oh, ow


def same_padding(kernel: tuple[int, int], dilation: int = 1) -> tuple[int, int]:
    """Symmetric padding that preserves spatial size at stride 1 (odd kernels)."""
    kh, kw = kernel
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"same padding needs odd kernel dims, got {kernel}")
    return (dilation * (kh - 1) // 2, dilation * (kw - 1) // 2)


def check_conv_weight(params: ConvParams, weight: np.ndarray, bias: np.ndarray | None) -> None:
    if tuple(weight.shape) != params.weight_shape:
        raise ShapeError(
            f"conv weight shape {tuple(weight.shape)} does not match expected "
            f"{params.weight_shape} (out, in/groups, kh, kw)"
        )
    if params.has_bias:
        if bias is None:
            raise ShapeError("conv declared has_bias=True but no bias array given")
        if bias.shape != (params.out_channels,):
            raise ShapeError(
                f"conv bias shape {tuple(bias.shape)} must be ({params.out_channels},)"
            )
    elif bias is not None:
        raise ShapeError("conv declared has_bias=False but a bias array was given")


def pad_input(x: np.ndarray, padding: tuple[int, int], pad_mode: str) -> np.ndarray:
    """Pad the two spatial axes of an NCHW array."""
    ph, pw = padding
    if ph == 0 and pw == 0:
        return x
    spec = ((0, 0), (0, 0), (ph, ph), (pw, pw))
    if pad_mode == "zero":
        return np.pad(x, spec, mode="constant")
    h, w = x.shape[2], x.shape[3]
    if ph > h - 1 or pw > w - 1:
        raise ShapeError(
            f"reflect padding {padding} too large for spatial size {h}x{w} "
            f"(needs pad <= size - 1)"
        )
    return np.pad(x, spec, mode="reflect")
