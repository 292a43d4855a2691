"""Slimmed residual model with attention blocks and mobile-style pieces.

Body convs use reflect padding and no bias; activations are h-swish and
each block ends in a squeeze-excite gate with a hard-sigmoid. The first
conv of every block is width-configurable so the body can ship in a
channel-pruned form (the default) or at full width for re-slimming
experiments. Reconstruction adds a bicubically upscaled input.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, se_gate, shuffle_upsampler


@dataclass(frozen=True)
class PpzConfig:
    width: int = 64
    body_width: int = 42  # first-conv output channels; 64 = unpruned
    blocks: int = 10
    se_reduction: int = 4


def _block(b: GraphBuilder, prefix: str, src: str, cfg: PpzConfig) -> str:
    w, bw = cfg.width, cfg.body_width
    c1 = b.conv(f"{prefix}.conv1", src, w, bw, pad_mode="reflect", bias=False, tag="ResBlk")
    a1 = b.act(f"{prefix}.act", c1, fn="h_swish", tag="ResBlk")
    c2 = b.conv(f"{prefix}.conv2", a1, bw, w, pad_mode="reflect", bias=False, tag="ResBlk")
    gated = se_gate(b, f"{prefix}.se", c2, w, reduction=cfg.se_reduction,
                    gate="h_sigmoid", tag="ResBlk")
    return b.add(f"{prefix}.add", [src, gated], tag="ResBlk")


def build_ppz(cfg: PpzConfig = PpzConfig()) -> Graph:
    if not 1 <= cfg.body_width:
        raise ValueError(f"body width must be positive, got {cfg.body_width}")
    w = cfg.width
    b = GraphBuilder(
        "ppz",
        meta={
            "arch": "ppz",
            "width": w,
            "body_width": cfg.body_width,
            "blocks": cfg.blocks,
            "se_reduction": cfg.se_reduction,
        },
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, w, pad_mode="reflect", bias=False, tag="SfeBlk")
    for i in range(cfg.blocks):
        x = _block(b, f"body.b{i}", x, cfg)
    x = shuffle_upsampler(b, "up", x, w)
    x = b.conv("rec.hr", x, w, w, tag="RecBlk")
    x = b.act("rec.act", x, fn="h_swish", tag="RecBlk")
    x = b.conv("rec.out", x, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bicubic", tag="SkipBlk")
    out = b.add("sr", [x, skip], tag="SkipBlk")
    return b.build(out)
