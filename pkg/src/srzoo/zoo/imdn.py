"""Information multi-distillation model (no attention).

Each body block peels off a distilled channel slice after three of its
convs, compresses the remainder a fourth time, rejoins the four slices
with a 1x1 fuse, and adds the block input. All eight block outputs are
concatenated, fused by 1x1 + 3x3 convs, rejoined with the head features,
and upscaled by a single conv + shuffle(4).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder


@dataclass(frozen=True)
class ImdnConfig:
    width: int = 64
    distilled: int = 16
    blocks: int = 8
    alpha: float = 0.2


def _imdb(b: GraphBuilder, prefix: str, src: str, cfg: ImdnConfig) -> str:
    w, d = cfg.width, cfg.distilled
    r = w - d
    sizes = (d, r)
    distilled = []
    cur = src
    for i in range(1, 4):
        cin = w if i == 1 else r
        c = b.conv(f"{prefix}.conv{i}", cur, cin, w, tag="ResBlk")
        a = b.act(f"{prefix}.act{i}", c, alpha=cfg.alpha, tag="ResBlk")
        distilled.append(b.split(f"{prefix}.keep{i}", a, sizes, 0, tag="ResBlk"))
        cur = b.split(f"{prefix}.pass{i}", a, sizes, 1, tag="ResBlk")
    c4 = b.conv(f"{prefix}.conv4", cur, r, d, tag="ResBlk")
    distilled.append(b.act(f"{prefix}.act4", c4, alpha=cfg.alpha, tag="ResBlk"))
    cat = b.concat(f"{prefix}.cat", distilled, tag="ResBlk")
    fuse = b.conv(f"{prefix}.fuse", cat, 4 * d, w, k=1, tag="ResBlk")
    return b.add(f"{prefix}.add", [src, fuse], tag="ResBlk")


def build_imdn(cfg: ImdnConfig = ImdnConfig()) -> Graph:
    if 4 * cfg.distilled != cfg.width:
        raise ValueError(
            f"distilled slice {cfg.distilled} must be width/4 so four slices "
            f"rebuild width {cfg.width}"
        )
    w = cfg.width
    b = GraphBuilder(
        "imdn",
        meta={
            "arch": "imdn",
            "width": w,
            "distilled": cfg.distilled,
            "blocks": cfg.blocks,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    head = b.conv("head", lr, 3, w, tag="SfeBlk")
    x = head
    outs = []
    for i in range(cfg.blocks):
        x = _imdb(b, f"body.b{i}", x, cfg)
        outs.append(x)
    cat = b.concat("body.cat", outs, tag="ResBlk")
    x = b.conv("body.fuse", cat, cfg.blocks * w, w, k=1, tag="ResBlk")
    x = b.act("body.fuse_act", x, alpha=cfg.alpha, tag="ResBlk")
    x = b.conv("body.tail", x, w, w, tag="ResBlk")
    x = b.add("body.skip", [head, x], tag="ResBlk")
    up = b.conv("up.conv", x, w, 3 * 16, tag="UpsBlk")
    out = b.pixel_shuffle("up.shuffle", up, 4, tag="UpsBlk")
    return b.build(out)
