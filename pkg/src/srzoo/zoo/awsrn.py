"""Adaptive-weighted model: wide-activation units and a multi-kernel tail.

Each unit expands the width by a factor, activates, contracts back, and
combines body and identity through two learnable scalars (both start at
1). Unit outputs are fused by a 1x1 conv plus block skip. The tail runs
parallel convs at several kernel sizes, each behind its own learnable
scalar, sums them, and shuffles straight to x4 RGB.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder


@dataclass(frozen=True)
class AwsrnConfig:
    width: int = 64
    units: int = 4
    expand: int = 4
    kernels: tuple[int, ...] = (3, 5, 7)
    scale_init: float = 1.0
    alpha: float = 0.2


def _awru(b: GraphBuilder, prefix: str, src: str, cfg: AwsrnConfig) -> str:
    w = cfg.width
    wide = w * cfg.expand
    c1 = b.conv(f"{prefix}.expand", src, w, wide, tag="ResBlk")
    a1 = b.act(f"{prefix}.act", c1, fn="relu", tag="ResBlk")
    c2 = b.conv(f"{prefix}.contract", a1, wide, w, tag="ResBlk")
    lam_res = b.scale(f"{prefix}.lambda_res", c2, learnable=True, init=cfg.scale_init, tag="ResBlk")
    lam_x = b.scale(f"{prefix}.lambda_x", src, learnable=True, init=cfg.scale_init, tag="ResBlk")
    return b.add(f"{prefix}.add", [lam_res, lam_x], tag="ResBlk")


def build_awsrn(cfg: AwsrnConfig = AwsrnConfig()) -> Graph:
    if cfg.expand < 1:
        raise ValueError(f"expand factor must be >= 1, got {cfg.expand}")
    if not cfg.kernels or any(k % 2 == 0 or k < 1 for k in cfg.kernels):
        raise ValueError(f"kernel sizes must be odd and positive, got {cfg.kernels}")
    w = cfg.width
    b = GraphBuilder(
        "awsrn",
        meta={
            "arch": "awsrn",
            "width": w,
            "units": cfg.units,
            "expand": cfg.expand,
            "kernels": "-".join(str(k) for k in cfg.kernels),
            "scale_init": cfg.scale_init,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    head = b.conv("head", lr, 3, w, tag="SfeBlk")
    x = head
    unit_outs = []
    for i in range(cfg.units):
        x = _awru(b, f"body.u{i}", x, cfg)
        unit_outs.append(x)
    cat = b.concat("body.cat", unit_outs, tag="ResBlk")
    fuse = b.conv("body.fuse", cat, cfg.units * w, w, k=1, tag="ResBlk")
    x = b.add("body.skip", [fuse, head], tag="ResBlk")
    branches = []
    for k in cfg.kernels:
        c = b.conv(f"tail.k{k}", x, w, 3 * 16, k=k, tag="UpsBlk")
        branches.append(
            b.scale(f"tail.k{k}.weight", c, learnable=True, init=cfg.scale_init, tag="UpsBlk")
        )
    merged = b.add("tail.merge", branches, tag="UpsBlk")
    up = b.pixel_shuffle("tail.shuffle", merged, 4, tag="UpsBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [up, skip], tag="SkipBlk")
    return b.build(out)
