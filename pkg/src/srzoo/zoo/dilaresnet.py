"""Dilated residual family with three constraint-oriented variants.

All variants keep the reference head/upsampler/reconstruction frame and
differ in the body: block count, per-block dilation pattern drawn from a
small menu, optional 0.5 residual scaling, and (variant 1) weight
sharing that reuses one pool of physical blocks several times. Dilation
changes the receptive field but neither parameters nor compute.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, shuffle_upsampler

DILATION_MENU = ((1, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class DilaResNetConfig:
    width: int = 64
    blocks: int = 15
    patterns: tuple[tuple[int, int], ...] = DILATION_MENU
    res_scale: float | None = 0.5
    share_period: int | None = None  # reuse physical block i % period
    alpha: float = 0.2

    def pattern_for(self, i: int) -> tuple[int, int]:
        if self.share_period:
            i = i % self.share_period
        return self.patterns[i % len(self.patterns)]


TRACK1 = DilaResNetConfig(blocks=15, res_scale=0.5, share_period=7)
TRACK2 = DilaResNetConfig(
    width=60, blocks=12, patterns=((1, 1), (2, 2)), res_scale=None
)
TRACK3 = DilaResNetConfig(blocks=15, res_scale=0.5)


def build_dilaresnet(cfg: DilaResNetConfig = TRACK3) -> Graph:
    for pat in cfg.patterns:
        if pat not in DILATION_MENU:
            raise ValueError(f"dilation pattern {pat} not in menu {DILATION_MENU}")
    if cfg.share_period is not None and cfg.share_period < 1:
        raise ValueError(f"share period must be positive, got {cfg.share_period}")
    w = cfg.width
    b = GraphBuilder(
        "dilaresnet",
        meta={
            "arch": "dilaresnet",
            "width": w,
            "blocks": cfg.blocks,
            "patterns": "-".join(f"{a}x{c}" for a, c in cfg.patterns),
            "res_scale": "none" if cfg.res_scale is None else cfg.res_scale,
            "share_period": "none" if cfg.share_period is None else cfg.share_period,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, w, tag="SfeBlk")
    for i in range(cfg.blocks):
        x = residual_block(
            b,
            f"body.b{i}",
            x,
            w,
            alpha=cfg.alpha,
            dilations=cfg.pattern_for(i),
            res_scale=cfg.res_scale,
            tag="ResBlk",
        )
    if cfg.share_period and cfg.share_period < cfg.blocks:
        groups: dict[int, list[int]] = {}
        for i in range(cfg.blocks):
            groups.setdefault(i % cfg.share_period, []).append(i)
        for members in groups.values():
            if len(members) < 2:
                continue
            b.share(*(f"body.b{i}.conv1" for i in members))
            b.share(*(f"body.b{i}.conv2" for i in members))
    x = shuffle_upsampler(b, "up", x, w, alpha=cfg.alpha)
    x = b.conv("rec.hr", x, w, w, tag="RecBlk")
    x = b.act("rec.act", x, alpha=cfg.alpha, tag="RecBlk")
    x = b.conv("rec.out", x, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [x, skip], tag="SkipBlk")
    return b.build(out)
