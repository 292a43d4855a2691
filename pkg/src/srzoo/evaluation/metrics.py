"""Fidelity metric and training-loss functionals.

PSNR follows the scoring convention for saved 8-bit images: both inputs
are quantized to integer [0, 255] values and a fixed border is excluded
before computing MSE over all RGB positions. Losses operate on the
normalized [0, 1] domain instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class PsnrScore:
    """PSNR in dB, or the distinguished lossless verdict when MSE is zero."""

    db: Optional[float]
    infinite: bool = False

    @property
    def value(self) -> float:
        if self.infinite:
            raise MetricError("lossless comparison has no finite dB value")
        return self.db  # type: ignore[return-value]

    def __str__(self):
        return "inf" if self.infinite else f"{self.db:.4f}"

    def to_json(self):
        return "inf" if self.infinite else self.db


def psnr(sr: np.ndarray, gt: np.ndarray, border: int = 4) -> PsnrScore:
    if sr.shape != gt.shape:
        raise MetricError(f"shape mismatch: sr {sr.shape} vs gt {gt.shape}")
    if border < 0:
        raise MetricError(f"border must be non-negative, got {border}")
    h, w = sr.shape[-2], sr.shape[-1]
    if h <= 2 * border or w <= 2 * border:
        raise MetricError(
            f"image ({h}, {w}) too small for a {border}-pixel border on each side"
        )
    a = np.clip(np.rint(sr), 0, 255).astype(np.int64)
    b = np.clip(np.rint(gt), 0, 255).astype(np.int64)
    if border:
        a = a[..., border:-border, border:-border]
        b = b[..., border:-border, border:-border]
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PsnrScore(db=None, infinite=True)
    return PsnrScore(db=10.0 * math.log10(255.0**2 / mse))


@dataclass(frozen=True)
class LossSpec:
    kind: str  # l1 | focal_l1 | l1_tv
    lam: float = 1e-4  # TV weight, l1_tv only
    granularity: str = "image"  # focal_l1 weighting: "image" or "pixel"

    def __post_init__(self):
        if self.kind not in ("l1", "focal_l1", "l1_tv"):
            raise MetricError(f"unknown loss kind {self.kind!r}")
        if self.lam < 0:
            raise MetricError(f"TV weight must be non-negative, got {self.lam}")
        if self.granularity not in ("image", "pixel"):
            raise MetricError(f"unknown focal granularity {self.granularity!r}")


def _tv_penalty(sr: np.ndarray) -> float:
    # forward differences with replicate boundary: last row/col gradient is 0
    dy = np.zeros_like(sr, dtype=np.float64)
    dx = np.zeros_like(sr, dtype=np.float64)
    dy[..., :-1, :] = np.diff(sr.astype(np.float64), axis=-2)
    dx[..., :, :-1] = np.diff(sr.astype(np.float64), axis=-1)
    return math.sqrt(float(np.sum(dy**2) + np.sum(dx**2))) / sr.size


def loss(sr: np.ndarray, gt: np.ndarray, spec: LossSpec) -> float:
    if sr.shape != gt.shape:
        raise MetricError(f"shape mismatch: sr {sr.shape} vs gt {gt.shape}")
    d = np.abs(sr.astype(np.float64) - gt.astype(np.float64))
    if spec.kind == "l1":
        return float(d.mean())
    if spec.kind == "focal_l1":
        if spec.granularity == "pixel":
            denom = float(d.sum())
            return 0.0 if denom == 0.0 else float((d * d).sum() / denom)
        per_item = d.reshape(d.shape[0], -1).mean(axis=1)
        denom = float(per_item.sum())
        return 0.0 if denom == 0.0 else float((per_item * per_item).sum() / denom)
    # l1_tv
    return float(d.mean()) + spec.lam * _tv_penalty(sr)
