"""Reference x4 model: residual body, shuffle upsampler, bilinear skip.

Layout: one 3->w feature conv (SfeBlk), B two-conv residual blocks at
width w (ResBlk), two conv-to-4w + shuffle stages (UpsBlk), an HR conv
plus the 3-channel projection (RecBlk), and a global skip that adds the
bilinearly upscaled input to the reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, shuffle_upsampler


@dataclass(frozen=True)
class MsrResNetConfig:
    width: int = 64
    blocks: int = 16
    alpha: float = 0.2


def build_msrresnet(cfg: MsrResNetConfig = MsrResNetConfig()) -> Graph:
    w = cfg.width
    b = GraphBuilder(
        "msrresnet",
        meta={"arch": "msrresnet", "width": w, "blocks": cfg.blocks, "alpha": cfg.alpha},
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, w, tag="SfeBlk")
    feat = x
    for i in range(cfg.blocks):
        x = residual_block(b, f"body.b{i}", x, w, alpha=cfg.alpha, tag="ResBlk")
    x = shuffle_upsampler(b, "up", x, w, alpha=cfg.alpha, tag="UpsBlk")
    x = b.conv("rec.hr", x, w, w, tag="RecBlk")
    x = b.act("rec.act", x, alpha=cfg.alpha, tag="RecBlk")
    x = b.conv("rec.out", x, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [x, skip], tag="SkipBlk")
    return b.build(out)
