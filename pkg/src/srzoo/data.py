"""Image I/O and dataset construction for the x4 pipeline.

Pixel domain is float32 in [0, 255] throughout; tensors are NCHW with a
batch dim of 1 per image. Model input normalization (divide by 255)
happens at the inference boundary, not here.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .tensor.ops import resize


class DataError(ValueError):
    pass


class UnsupportedImageError(DataError):
    pass


@dataclass(frozen=True)
class ImagePair:
    hr: np.ndarray  # (1, 3, H, W), H and W divisible by 4
    lr: np.ndarray  # (1, 3, H/4, W/4)
    id: str

    def __post_init__(self):
        _, _, h, w = self.hr.shape
        if self.lr.shape != (self.hr.shape[0], self.hr.shape[1], h // 4, w // 4):
            raise DataError(
                f"pair {self.id!r}: lr shape {self.lr.shape} is not hr/4 of {self.hr.shape}"
            )


def load_png(path: str) -> np.ndarray:
    try:
        img = Image.open(path)
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise DataError(f"cannot read image {path!r}: {exc}") from None
    if img.mode != "RGB":
        raise UnsupportedImageError(
            f"{path!r} has mode {img.mode!r}; only 8-bit RGB images are supported"
        )
    arr = np.asarray(img, dtype=np.float32)  # (H, W, 3)
    return np.ascontiguousarray(arr.transpose(2, 0, 1))[None]


def save_png(t: np.ndarray, path: str) -> None:
    if t.ndim == 4:
        if t.shape[0] != 1:
            raise DataError(f"expected a single image, got batch of {t.shape[0]}")
        t = t[0]
    if t.ndim != 3 or t.shape[0] != 3:
        raise DataError(f"expected (3, H, W) pixels, got shape {t.shape}")
    q = np.clip(np.rint(t), 0, 255).astype(np.uint8)
    Image.fromarray(q.transpose(1, 2, 0), mode="RGB").save(path, format="PNG")


def quantize(t: np.ndarray) -> np.ndarray:
    """The save-then-load value mapping: clamp to [0,255] and round."""
    return np.clip(np.rint(t), 0, 255).astype(np.float32)


def degrade_bicubic_x4(hr: np.ndarray) -> np.ndarray:
    _, _, h, w = hr.shape
    if h % 4 or w % 4:
        raise DataError(
            f"image dims ({h}, {w}) must be divisible by 4; crop before degrading"
        )
    lr = resize(hr, 0.25, mode="bicubic", antialias=True)
    return np.clip(lr, 0.0, 255.0)


def make_pair(hr: np.ndarray, id: str) -> ImagePair:
    return ImagePair(hr=hr, lr=degrade_bicubic_x4(hr), id=id)


def crop_patches(pair: ImagePair, hr_patch: int, count: int, seed: int) -> list:
    _, _, h, w = pair.hr.shape
    if hr_patch % 4:
        raise DataError(f"patch size {hr_patch} must be divisible by 4")
    if hr_patch > min(h, w):
        raise DataError(f"patch size {hr_patch} exceeds image dims ({h}, {w})")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        # sample on the x4 grid so the lr window shows the same content
        top = 4 * int(rng.integers(0, (h - hr_patch) // 4 + 1))
        left = 4 * int(rng.integers(0, (w - hr_patch) // 4 + 1))
        hr_crop = pair.hr[:, :, top : top + hr_patch, left : left + hr_patch]
        lt, ll, lp = top // 4, left // 4, hr_patch // 4
        lr_crop = pair.lr[:, :, lt : lt + lp, ll : ll + lp]
        out.append(ImagePair(np.ascontiguousarray(hr_crop), np.ascontiguousarray(lr_crop), f"{pair.id}#p{i}"))
    return out


def augment8(t: np.ndarray, index: int) -> np.ndarray:
    """Dihedral-group transform of an NCHW tensor; index 0 is the identity,
    1..3 rotate by 90/180/270, 4..7 add a horizontal flip."""
    if not 0 <= index <= 7:
        raise DataError(f"augmentation index {index} outside 0..7")
    out = t
    if index >= 4:
        out = out[:, :, :, ::-1]
    k = index % 4
    if k:
        out = np.rot90(out, k, axes=(2, 3))
    return np.ascontiguousarray(out)


def list_images(dir_path: str) -> list:
    """PNG files of a directory, sorted by stem for stable ordering."""
    if not os.path.isdir(dir_path):
        raise DataError(f"not a directory: {dir_path!r}")
    names = [n for n in os.listdir(dir_path) if n.lower().endswith(".png")]
    return [os.path.join(dir_path, n) for n in sorted(names)]
