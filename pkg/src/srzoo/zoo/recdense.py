"""Recurrent-dense model: two block groups, each executed twice.

Each group of three residual blocks runs twice through shared weights;
after every pass the stage output is concatenated with its input and
compressed by that group's (also shared) 1x1 reducer. A fusion conv over
the head features and the final stage feeds the standard upsampler.
Sharing halves the body's unique parameters while leaving compute per
pass untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, shuffle_upsampler


@dataclass(frozen=True)
class RecDenseConfig:
    width: int = 64
    group_blocks: int = 3
    passes: int = 2
    alpha: float = 0.2


def build_recdense(cfg: RecDenseConfig = RecDenseConfig()) -> Graph:
    if cfg.passes < 1:
        raise ValueError(f"passes must be >= 1, got {cfg.passes}")
    w = cfg.width
    b = GraphBuilder(
        "recdense",
        meta={
            "arch": "recdense",
            "width": w,
            "group_blocks": cfg.group_blocks,
            "passes": cfg.passes,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    head = b.conv("head", lr, 3, w, tag="SfeBlk")
    x = head

    conv_ids: dict[tuple[str, int, str], list[str]] = {}
    reducer_ids: dict[str, list[str]] = {"ga": [], "gb": []}
    for group in ("ga", "gb"):
        for p in range(cfg.passes):
            prefix = f"{group}.p{p}"
            stage_in = x
            for i in range(cfg.group_blocks):
                x = residual_block(b, f"{prefix}.b{i}", x, w, alpha=cfg.alpha, tag="ResBlk")
                for leg in ("conv1", "conv2"):
                    conv_ids.setdefault((group, i, leg), []).append(f"{prefix}.b{i}.{leg}")
            cat = b.concat(f"{prefix}.cat", [stage_in, x], tag="FuseBlk")
            x = b.conv(f"{prefix}.reduce", cat, 2 * w, w, k=1, tag="FuseBlk")
            reducer_ids[group].append(f"{prefix}.reduce")
    for ids in conv_ids.values():
        if len(ids) > 1:
            b.share(*ids)
    for ids in reducer_ids.values():
        if len(ids) > 1:
            b.share(*ids)

    cat = b.concat("fuse.cat", [head, x], tag="FuseBlk")
    x = b.conv("fuse.conv", cat, 2 * w, w, tag="FuseBlk")
    x = shuffle_upsampler(b, "up", x, w, alpha=cfg.alpha)
    x = b.conv("rec.hr", x, w, w, tag="RecBlk")
    x = b.act("rec.act", x, alpha=cfg.alpha, tag="RecBlk")
    x = b.conv("rec.out", x, w, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [x, skip], tag="SkipBlk")
    return b.build(out)
