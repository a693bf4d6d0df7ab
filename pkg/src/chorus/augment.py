"""Deterministic grayscale image transforms used to vary training data.

Five knobs: horizontal/vertical translation (whole dataset), rotation
(whole dataset), contrast scaling and color inversion (seeded subsets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TRANSLATIONS = (-2, -1, 0, 1, 2)
ROTATIONS = (-20, -15, -10, -5, 0, 5, 10, 15, 20)
CONTRAST_FACTORS = (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8)
PROPORTIONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)

_CENTER = 13.5  # rotation pivot for a 28x28 raster


@dataclass(frozen=True)
class AugmentationSpec:
    dx: int = 0
    dy: int = 0
    rotation_deg: int = 0
    contrast_factor: float = 1.0
    contrast_proportion: float = 0.0
    inversion_proportion: float = 0.0

    def __post_init__(self):
        if self.dx not in TRANSLATIONS or self.dy not in TRANSLATIONS:
            raise ValueError(f"translation ({self.dx}, {self.dy}) outside +/-2")
        if self.rotation_deg not in ROTATIONS:
            raise ValueError(f"rotation {self.rotation_deg} not in {ROTATIONS}")
        if self.contrast_factor not in CONTRAST_FACTORS:
            raise ValueError(f"contrast factor {self.contrast_factor} not allowed")
        if self.contrast_proportion not in PROPORTIONS:
            raise ValueError(f"contrast proportion {self.contrast_proportion} not allowed")
        if self.inversion_proportion not in PROPORTIONS:
            raise ValueError(f"inversion proportion {self.inversion_proportion} not allowed")

    @property
    def is_identity(self) -> bool:
        return (
            self.dx == 0
            and self.dy == 0
            and self.rotation_deg == 0
            and (self.contrast_proportion == 0.0 or self.contrast_factor == 1.0)
            and self.inversion_proportion == 0.0
        )


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def translate(image: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Shift pixels by (dx, dy); cells shifted in from outside are black."""
    if abs(dx) > 2 or abs(dy) > 2:
        raise ValueError(f"translation ({dx}, {dy}) exceeds 2 pixels")
    out = np.zeros_like(image)
    h, w = image.shape
    src_r = slice(max(0, -dy), min(h, h - dy))
    src_c = slice(max(0, -dx), min(w, w - dx))
    dst_r = slice(max(0, dy), min(h, h + dy))
    dst_c = slice(max(0, dx), min(w, w + dx))
    out[dst_r, dst_c] = image[src_r, src_c]
    return out


def rotate(image: np.ndarray, degrees: int) -> np.ndarray:
    """Rotate about the raster center by inverse mapping with bilinear sampling.

    Positive angles rotate counter-clockwise in (x=col, y=row) coordinates.
    Samples falling outside the frame read as 0.
    """
    if degrees not in ROTATIONS:
        raise ValueError(f"rotation {degrees} not in {ROTATIONS}")
    if degrees == 0:
        return image.copy()
    theta = math.radians(degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    rows, cols = np.meshgrid(np.arange(28), np.arange(28), indexing="ij")
    x = cols - _CENTER
    y = rows - _CENTER
    # inverse rotation: where did each output pixel come from
    src_x = cos_t * x + sin_t * y + _CENTER
    src_y = -sin_t * x + cos_t * y + _CENTER

    x0 = np.floor(src_x).astype(int)
    y0 = np.floor(src_y).astype(int)
    fx = src_x - x0
    fy = src_y - y0

    def sample(yy, xx):
        valid = (yy >= 0) & (yy < 28) & (xx >= 0) & (xx < 28)
        vals = np.zeros(yy.shape, dtype=np.float64)
        vals[valid] = image[yy[valid], xx[valid]]
        return vals

    top = sample(y0, x0) * (1 - fx) + sample(y0, x0 + 1) * fx
    bottom = sample(y0 + 1, x0) * (1 - fx) + sample(y0 + 1, x0 + 1) * fx
    blended = top * (1 - fy) + bottom * fy
    return np.clip(_round_half_up(blended), 0, 255).astype(np.uint8)


def adjust_contrast(image: np.ndarray, factor: float) -> np.ndarray:
    """Scale pixel values linearly about the 127.5 midpoint, clamped to [0, 255]."""
    if not 0.2 <= factor <= 1.8:
        raise ValueError(f"contrast factor {factor} outside [0.2, 1.8]")
    scaled = (image.astype(np.float64) - 127.5) * factor + 127.5
    return np.clip(_round_half_up(scaled), 0, 255).astype(np.uint8)


def invert(image: np.ndarray) -> np.ndarray:
    return (255 - image.astype(np.int16)).astype(np.uint8)


def subset_size(proportion: float, n: int) -> int:
    return int(math.floor(proportion * n + 0.5))


def apply_spec(images: np.ndarray, spec: AugmentationSpec, seed: int) -> np.ndarray:
    """Apply one augmentation spec to a stack of images, deterministically.

    Translation and rotation hit every image; contrast and inversion each
    hit an independently drawn uniform subset of round(proportion * n)
    images. Image order is preserved.
    """
    n = len(images)
    out = np.empty_like(images)
    for i in range(n):
        img = images[i]
        if spec.dx or spec.dy:
            img = translate(img, spec.dx, spec.dy)
        if spec.rotation_deg:
            img = rotate(img, spec.rotation_deg)
        out[i] = img

    rng = np.random.default_rng(seed)
    k_contrast = subset_size(spec.contrast_proportion, n)
    contrast_idx = rng.choice(n, size=k_contrast, replace=False) if n else []
    k_invert = subset_size(spec.inversion_proportion, n)
    invert_idx = rng.choice(n, size=k_invert, replace=False) if n else []

    if spec.contrast_factor != 1.0:
        for i in contrast_idx:
            out[i] = adjust_contrast(out[i], spec.contrast_factor)
    for i in invert_idx:
        out[i] = invert(out[i])
    return out
