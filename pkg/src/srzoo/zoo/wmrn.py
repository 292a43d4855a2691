"""Lightweight frame with two-branch depthwise-separable residual blocks.

Each body block runs a depthwise 3x3 branch and a depthwise 5x5 branch
(each: depthwise conv, activation, 1x1 pointwise, learnable scale),
sums them, and adds the block input. The reconstruction stage fuses the
early feature map with the body output by concatenation before
upsampling.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, shuffle_upsampler


@dataclass(frozen=True)
class WmrnConfig:
    width: int = 64
    blocks: int = 12
    kernels: tuple[int, int] = (3, 5)
    alpha: float = 0.2


def _sep_branch(
    b: GraphBuilder, prefix: str, src: str, width: int, k: int, alpha: float, tag: str
) -> str:
    dw = b.conv(f"{prefix}.dw", src, width, width, k=k, groups=width, tag=tag)
    a = b.act(f"{prefix}.act", dw, alpha=alpha, tag=tag)
    pw = b.conv(f"{prefix}.pw", a, width, width, k=1, tag=tag)
    return b.scale(f"{prefix}.lam", pw, learnable=True, init=1.0, tag=tag)


def wm_res_block(
    b: GraphBuilder,
    prefix: str,
    src: str,
    width: int,
    kernels: tuple[int, int],
    alpha: float,
    tag: str = "NlmBlk",
) -> str:
    ka, kb = kernels
    ba = _sep_branch(b, f"{prefix}.k{ka}", src, width, ka, alpha, tag)
    bb = _sep_branch(b, f"{prefix}.k{kb}", src, width, kb, alpha, tag)
    merged = b.add(f"{prefix}.merge", [ba, bb], tag=tag)
    return b.add(f"{prefix}.add", [src, merged], tag=tag)


def build_wmrn(cfg: WmrnConfig = WmrnConfig()) -> Graph:
    w = cfg.width
    b = GraphBuilder(
        "wmrn",
        meta={
            "arch": "wmrn",
            "width": w,
            "blocks": cfg.blocks,
            "kernels": "-".join(str(k) for k in cfg.kernels),
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    head = b.conv("head", lr, 3, w, tag="SfeBlk")
    fe = residual_block(b, "fe", head, w, alpha=cfg.alpha, tag="FeBlk")
    x = fe
    for i in range(cfg.blocks):
        x = wm_res_block(b, f"body.b{i}", x, w, cfg.kernels, cfg.alpha)
    cat = b.concat("rec.cat", [fe, x], tag="RecBlk")
    fuse = b.conv("rec.fuse", cat, 2 * w, w, tag="RecBlk")
    fa = b.act("rec.fuse_act", fuse, alpha=cfg.alpha, tag="RecBlk")
    up = shuffle_upsampler(b, "up", fa, w, alpha=cfg.alpha)
    out = b.conv("rec.out", up, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    sr = b.add("sr", [out, skip], tag="SkipBlk")
    return b.build(sr)
