"""From-scratch NCHW tensor kernels (numpy-backed) with reference twins."""

from .core import ConvParams, ShapeError, as_nchw, same_padding
from .ops import (
    ACTIVATIONS,
    RESIZE_MODES,
    activation,
    concat_channels,
    conv2d,
    elementwise,
    global_avg_pool,
    pixel_shuffle,
    pixel_unshuffle,
    resize,
    resize_out_size,
    split_channels,
)

__all__ = [
    "ACTIVATIONS",
    "RESIZE_MODES",
    "ConvParams",
    "ShapeError",
    "activation",
    "as_nchw",
    "concat_channels",
    "conv2d",
    "elementwise",
    "global_avg_pool",
    "pixel_shuffle",
    "pixel_unshuffle",
    "resize",
    "resize_out_size",
    "same_padding",
    "split_channels",
]
