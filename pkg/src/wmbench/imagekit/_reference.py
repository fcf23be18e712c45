"""NumPy/SciPy fallback for the pixel kernels.

Semantics must match the compiled extension exactly: true 2-D convolution
(kernel flipped) with reflect padding, and counter-clockwise bilinear
rotation about the image center with zero fill.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import convolve2d

BACKEND_NAME = "python"


def conv2d_reflect(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-size true convolution of a 2-D plane with reflect padding.

    The 'same' crop anchors the kernel at index (s-1)//2, so even kernels
    sit at the half-pixel offset.
    """
    kh, kw = kernel.shape
    padded = np.pad(plane, ((kh // 2, (kh - 1) // 2), (kw // 2, (kw - 1) // 2)),
                    mode="reflect")
    return convolve2d(padded, kernel, mode="valid")


def rotate_bilinear(image: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate an H x W x C image counter-clockwise, zero-filled, same shape."""
    h, w, _ = image.shape
    theta = math.radians(degrees)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0

    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    # Inverse map: sample the source at the clockwise-rotated coordinate.
    dx = xx - cx
    dy = yy - cy
    src_x = cos_t * dx - sin_t * dy + cx
    src_y = sin_t * dx + cos_t * dy + cy

    x0 = np.floor(src_x).astype(np.int64)
    y0 = np.floor(src_y).astype(np.int64)
    fx = src_x - x0
    fy = src_y - y0

    out = np.zeros_like(image, dtype=np.float64)
    corners = ((y0, x0, (1 - fy) * (1 - fx)), (y0, x0 + 1, (1 - fy) * fx),
               (y0 + 1, x0, fy * (1 - fx)), (y0 + 1, x0 + 1, fy * fx))
    for yi, xi, weight in corners:
        valid = (yi >= 0) & (yi < h) & (xi >= 0) & (xi < w)
        ys = np.clip(yi, 0, h - 1)
        xs = np.clip(xi, 0, w - 1)
        contrib = image[ys, xs, :] * (weight * valid)[..., None]
        out += contrib
    return out
