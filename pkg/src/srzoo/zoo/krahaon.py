"""Progressive-narrowing residual family covering the searched space.

The body runs n_x residual blocks at width x, upsamples x2 while
narrowing to y, runs n_y blocks, upsamples x2 narrowing to z, runs n_z
blocks, and projects to RGB. With x = y = z and no narrow-stage blocks
the layout degenerates to the reference body/upsampler pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ir.graph import Graph
from .common import GraphBuilder, residual_block

WIDTH_CHOICES = (48, 64, 80, 96)


@dataclass(frozen=True)
class KrahaonConfig:
    x: int = 64
    y: int = 16
    z: int = 4
    n_x: int = 19
    n_y: int = 12
    n_z: int = 3
    alpha: float = 0.2

    def check(self) -> None:
        """Builder domain: widths halve or quarter (or stay, the degenerate
        no-narrowing case) and block counts stay in the searched ranges."""
        if self.x < 1 or self.y < 1 or self.z < 1:
            raise ValueError(f"widths must be positive, got ({self.x}, {self.y}, {self.z})")
        if self.x > max(WIDTH_CHOICES):
            raise ValueError(f"x={self.x} outside supported domain (max {max(WIDTH_CHOICES)})")
        if self.y not in (self.x, self.x // 2, self.x // 4):
            raise ValueError(f"y={self.y} must be one of x, x/2, x/4 for x={self.x}")
        if self.z not in (self.y, self.y // 2, self.y // 4):
            raise ValueError(f"z={self.z} must be one of y, y/2, y/4 for y={self.y}")
        if not 0 <= self.n_x <= 30:
            raise ValueError(f"n_x={self.n_x} outside 0..30")
        if not 0 <= self.n_y <= 16:
            raise ValueError(f"n_y={self.n_y} outside 0..16")
        if not 0 <= self.n_z <= 16:
            raise ValueError(f"n_z={self.n_z} outside 0..16")


def build_krahaon(cfg: KrahaonConfig = KrahaonConfig()) -> Graph:
    cfg.check()
    b = GraphBuilder(
        "krahaon",
        meta={
            "arch": "krahaon",
            "x": cfg.x, "y": cfg.y, "z": cfg.z,
            "n_x": cfg.n_x, "n_y": cfg.n_y, "n_z": cfg.n_z,
            "alpha": cfg.alpha,
        },
    )
    lr = b.input("lr")
    x = b.conv("head", lr, 3, cfg.x, tag="SfeBlk")
    for i in range(cfg.n_x):
        x = residual_block(b, f"stage_x.b{i}", x, cfg.x, alpha=cfg.alpha, tag="ResBlk")
    c = b.conv("up1.conv", x, cfg.x, 4 * cfg.y, tag="UpsBlk")
    s = b.pixel_shuffle("up1.shuffle", c, 2, tag="UpsBlk")
    x = b.act("up1.act", s, alpha=cfg.alpha, tag="UpsBlk")
    for i in range(cfg.n_y):
        x = residual_block(b, f"stage_y.b{i}", x, cfg.y, alpha=cfg.alpha, tag="ResBlk")
    c = b.conv("up2.conv", x, cfg.y, 4 * cfg.z, tag="UpsBlk")
    s = b.pixel_shuffle("up2.shuffle", c, 2, tag="UpsBlk")
    x = b.act("up2.act", s, alpha=cfg.alpha, tag="UpsBlk")
    for i in range(cfg.n_z):
        x = residual_block(b, f"stage_z.b{i}", x, cfg.z, alpha=cfg.alpha, tag="ResBlk")
    rec = b.conv("rec.out", x, cfg.z, 3, tag="RecBlk")
    skip = b.resize("skip", lr, 4, mode="bilinear", tag="SkipBlk")
    out = b.add("sr", [rec, skip], tag="SkipBlk")
    return b.build(out)
