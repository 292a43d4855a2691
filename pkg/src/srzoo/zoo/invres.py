"""Reference frame with inverted-residual body blocks, plus a block menu.

The default body stacks inverted residuals: 1x1 expand by ratio t, 3x3
depthwise, 1x1 project, identity skip. A per-position menu of four block
kinds (inverted residual at t=3 or t=6, plain residual with ReLU or
leaky ReLU) supports enumerating small mixed bodies.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, shuffle_upsampler

BLOCK_MENU = ("invres_t3", "invres_t6", "basic_residual", "basic_residual_lrelu")


@dataclass(frozen=True)
class InvResConfig:
    width: int = 80
    blocks: int = 16
    expand_ratio: int = 3
    bias: bool = True
    menu: tuple[str, ...] = ()  # per-position kinds; empty = homogeneous body
    alpha: float = 0.2


def inverted_residual(
    b: GraphBuilder,
    prefix: str,
    src: str,
    width: int,
    expand_ratio: int,
    bias: bool = True,
    tag: str = "ResBlk",
) -> str:
    if expand_ratio < 1:
        raise ValueError(f"expansion ratio must be >= 1, got {expand_ratio}")
    wide = width * expand_ratio
    c1 = b.conv(f"{prefix}.expand", src, width, wide, k=1, bias=bias, tag=tag)
    a1 = b.act(f"{prefix}.act1", c1, fn="relu", tag=tag)
    c2 = b.conv(f"{prefix}.depthwise", a1, wide, wide, groups=wide, bias=bias, tag=tag)
    a2 = b.act(f"{prefix}.act2", c2, fn="relu", tag=tag)
    c3 = b.conv(f"{prefix}.project", a2, wide, width, k=1, bias=bias, tag=tag)
    return b.add(f"{prefix}.add", [src, c3], tag=tag)


def _menu_block(b: GraphBuilder, kind: str, prefix: str, src: str, cfg: InvResConfig) -> str:
    if kind == "invres_t3":
        return inverted_residual(b, prefix, src, cfg.width, 3, bias=cfg.bias)
    if kind == "invres_t6":
        return inverted_residual(b, prefix, src, cfg.width, 6, bias=cfg.bias)
    if kind == "basic_residual":
        return residual_block(b, prefix, src, cfg.width, act="relu", bias=cfg.bias, tag="ResBlk")
    if kind == "basic_residual_lrelu":
        return residual_block(
            b, prefix, src, cfg.width, act="leaky_relu", alpha=cfg.alpha, bias=cfg.bias, tag="ResBlk"
        )
    raise ValueError(f"unknown block kind {kind!r}, menu is {BLOCK_MENU}")


def build_invres(cfg: InvResConfig = InvResConfig()) -> Graph:
    if cfg.expand_ratio < 1:
        raise ValueError(f"expansion ratio must be >= 1, got {cfg.expand_ratio}")
    if cfg.menu and len(cfg.menu) != cfg.blocks:
        raise ValueError(
            f"menu length {len(cfg.menu)} must match block count {cfg.blocks}"
        )
    w = cfg.width
    b = GraphBuilder(
        "invres",
        meta={
            "arch": "invres",
            "width": w,
            "blocks": cfg.blocks,
            "expand_ratio": cfg.expand_ratio,
            "bias": int(cfg.bias),
            "menu": "-".join(cfg.menu) if cfg.menu else "none",
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, w, tag="SfeBlk")
    for i in range(cfg.blocks):
        if cfg.menu:
            x = _menu_block(b, cfg.menu[i], f"body.b{i}", x, cfg)
        else:
            x = inverted_residual(b, f"body.b{i}", x, w, cfg.expand_ratio, bias=cfg.bias)
    x = shuffle_upsampler(b, "up", x, w, alpha=cfg.alpha)
    x = b.conv("rec.hr", x, w, w, tag="RecBlk")
    x = b.act("rec.act", x, alpha=cfg.alpha, tag="RecBlk")
    x = b.conv("rec.out", x, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [x, skip], tag="SkipBlk")
    return b.build(out)
