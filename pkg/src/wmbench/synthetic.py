"""Seeded procedural image corpus: textured shapes over smooth backgrounds.

Keeps the whole workbench runnable without downloading a dataset: image i of
a corpus is a pure function of (corpus seed, i).
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import zoom


def _smooth_field(rng: np.random.Generator, size: int, cells: int) -> np.ndarray:
    low = rng.uniform(0.0, 1.0, size=(cells, cells, 3))
    factor = size / cells
    return zoom(low, (factor, factor, 1.0), order=1, mode="nearest")


def _texture(rng: np.random.Generator, size: int) -> np.ndarray:
    """Scalar texture field in [-1, 1]."""
    kind = rng.integers(0, 3)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    if kind == 0:  # oriented stripes
        theta = rng.uniform(0, np.pi)
        freq = rng.uniform(0.15, 0.9)
        phase = rng.uniform(0, 2 * np.pi)
        return np.sin(freq * (np.cos(theta) * xx + np.sin(theta) * yy) + phase)
    if kind == 1:  # checker
        cell = int(rng.integers(2, 7))
        return np.where(((yy // cell) + (xx // cell)) % 2 == 0, 1.0, -1.0)
    # speckle
    return rng.uniform(-1.0, 1.0, size=(size, size))


def _shape_mask(rng: np.random.Generator, size: int) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cy, cx = rng.uniform(0.15 * size, 0.85 * size, size=2)
    kind = rng.integers(0, 3)
    if kind == 0:  # disk
        r = rng.uniform(0.08 * size, 0.3 * size)
        return (yy - cy) ** 2 + (xx - cx) ** 2 <= r**2
    if kind == 1:  # axis-aligned rectangle
        hh = rng.uniform(0.06 * size, 0.25 * size)
        ww = rng.uniform(0.06 * size, 0.25 * size)
        return (np.abs(yy - cy) <= hh) & (np.abs(xx - cx) <= ww)
    # half-plane wedge clipped to a disk
    r = rng.uniform(0.1 * size, 0.32 * size)
    theta = rng.uniform(0, 2 * np.pi)
    nx, ny = np.cos(theta), np.sin(theta)
    disk = (yy - cy) ** 2 + (xx - cx) ** 2 <= r**2
    return disk & ((xx - cx) * nx + (yy - cy) * ny >= 0)


def synthetic_image(seed: int, size: int = 64) -> np.ndarray:
    """Deterministic procedural RGB image in [0, 1], shape (size, size, 3)."""
    rng = np.random.default_rng(np.random.SeedSequence([0x5EED, int(seed)]))
    img = _smooth_field(rng, size, cells=int(rng.integers(2, 5)))
    for _ in range(int(rng.integers(2, 6))):
        mask = _shape_mask(rng, size)
        color = rng.uniform(0.0, 1.0, size=3)
        tex = _texture(rng, size) * rng.uniform(0.05, 0.25)
        patch = np.clip(color[None, None, :] + tex[..., None], 0.0, 1.0)
        img = np.where(mask[..., None], patch, img)
    # mild smoothing so edges are not single-pixel hard
    img = 0.7 * img + 0.3 * zoom(zoom(img, (0.5, 0.5, 1), order=1),
                                 (2, 2, 1), order=1)[: img.shape[0], : img.shape[1]]
    return np.clip(img, 0.0, 1.0)


def corpus(seed: int, count: int, size: int = 64) -> np.ndarray:
    """Stack of `count` procedural images, shape (count, size, size, 3)."""
    return np.stack([synthetic_image(seed * 1_000_003 + i, size)
                     for i in range(count)])
