"""Residual model whose upsampler carries no weights at all.

Feature maps tapped at several body depths are concatenated and passed
through two parameter-free shuffle stages; reconstruction is a single
3-channel conv. Keeps inference cheap where upsampling convs would
normally dominate the tail.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block


@dataclass(frozen=True)
class NoucsrConfig:
    width: int = 64
    blocks: int = 16
    taps: tuple[int, ...] = (4, 8, 12, 16)
    alpha: float = 0.2


def build_noucsr(cfg: NoucsrConfig = NoucsrConfig()) -> Graph:
    for t in cfg.taps:
        if not 1 <= t <= cfg.blocks:
            raise ValueError(f"tap {t} out of range 1..{cfg.blocks}")
    if len(set(cfg.taps)) != len(cfg.taps):
        raise ValueError(f"taps must be distinct, got {cfg.taps}")
    cat_c = len(cfg.taps) * cfg.width
    if cat_c % 16:
        raise ValueError(
            f"concatenated width {cat_c} must be divisible by 16 for two "
            "shuffle(2) stages"
        )
    w = cfg.width
    b = GraphBuilder(
        "noucsr",
        meta={
            "arch": "noucsr",
            "width": w,
            "blocks": cfg.blocks,
            "taps": "-".join(str(t) for t in cfg.taps),
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, w, tag="SfeBlk")
    tapped = {}
    for i in range(cfg.blocks):
        x = residual_block(b, f"body.b{i}", x, w, alpha=cfg.alpha, tag="ResBlk")
        tapped[i + 1] = x
    cat = b.concat("up.cat", [tapped[t] for t in cfg.taps], tag="UpsBlk")
    s1 = b.pixel_shuffle("up.shuffle1", cat, 2, tag="UpsBlk")
    s2 = b.pixel_shuffle("up.shuffle2", s1, 2, tag="UpsBlk")
    rec = b.conv("rec.out", s2, cat_c // 16, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [rec, skip], tag="SkipBlk")
    return b.build(out)
