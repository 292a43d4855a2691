"""Aggregation model: bias-free uniform-width body, fused attention tail.

The body keeps one channel width throughout and uses no bias anywhere.
Each aggregation block chains four residual units and emits the
concatenation of its unit outputs; the fusion stage collects every
block's aggregate, combines them with a 1x1 conv, applies a
squeeze-excite gate, and adds the entry features back as a global
residual before the progressive shuffle upsampler.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block, se_gate


@dataclass(frozen=True)
class AssrConfig:
    width: int = 64
    agg_blocks: int = 3
    units: int = 4
    se_reduction: int = 4
    alpha: float = 0.2


def build_assr(cfg: AssrConfig = AssrConfig()) -> Graph:
    w = cfg.width
    b = GraphBuilder(
        "assr",
        meta={
            "arch": "assr",
            "width": w,
            "agg_blocks": cfg.agg_blocks,
            "units": cfg.units,
            "se_reduction": cfg.se_reduction,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    siel = b.conv("siel", lr, 3, w, tag="SfeBlk")
    x = siel
    aggregates = []
    for i in range(cfg.agg_blocks):
        unit_outs = []
        for j in range(cfg.units):
            x = residual_block(
                b, f"body.ab{i}.u{j}", x, w, alpha=cfg.alpha, bias=False, tag="ResBlk"
            )
            unit_outs.append(x)
        aggregates.append(b.concat(f"body.ab{i}.cat", unit_outs, tag="ResBlk"))
    cat = b.concat("aff.cat", aggregates, tag="AffBlk")
    fused = b.conv(
        "aff.fuse", cat, cfg.agg_blocks * cfg.units * w, w, k=1, bias=False, tag="AffBlk"
    )
    gated = se_gate(b, "aff.se", fused, w, reduction=cfg.se_reduction, tag="AffBlk")
    x = b.add("aff.global_residual", [gated, siel], tag="AffBlk")
    c1 = b.conv("usn.conv1", x, w, 4 * w, tag="UpsBlk")
    s1 = b.pixel_shuffle("usn.shuffle1", c1, 2, tag="UpsBlk")
    a1 = b.act("usn.act1", s1, alpha=cfg.alpha, tag="UpsBlk")
    c2 = b.conv("usn.conv2", a1, w, 12, tag="UpsBlk")
    out = b.pixel_shuffle("usn.shuffle2", c2, 2, tag="UpsBlk")
    return b.build(out)
