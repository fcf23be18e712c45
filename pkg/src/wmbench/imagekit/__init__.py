"""Pixel- and Fourier-space primitives shared by every other module.

Images are H x W x C float arrays in [0, 1], RGB. All operations are pure;
outputs are clamped back into [0, 1] at the public boundary. The convolution
and rotation inner loops run in a compiled extension when available; set
WMBENCH_KERNELS=python to force the NumPy/SciPy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument, NumericalInconsistency
from . import _reference

_requested = os.environ.get("WMBENCH_KERNELS", "").strip().lower()
if _requested == "python":
    _impl = _reference
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _reference

BACKEND: str = _impl.BACKEND_NAME

MIN_SIDE = 8


@dataclass(frozen=True)
class Kernel:
    """Normalized s x s convolution kernel."""

    weights: np.ndarray
    size: int
    sigma: float


@dataclass(frozen=True)
class Mask:
    """Binary pixel selection, same spatial shape as the image it applies to."""

    bits: np.ndarray

    @property
    def coverage(self) -> float:
        return float(self.bits.mean())


@dataclass(frozen=True)
class FourierField:
    """Per-channel 2-D DFT coefficients, zero-frequency centered."""

    coefficients: np.ndarray


def validate_image(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3:
        raise InvalidArgument(f"image must be H x W x C, got shape {image.shape}")
    if image.shape[0] < MIN_SIDE or image.shape[1] < MIN_SIDE:
        raise InvalidArgument(f"image sides must be >= {MIN_SIDE}")
    if not np.all(np.isfinite(image)):
        raise InvalidArgument("image contains non-finite values")
    return image


def clamp01(image: np.ndarray) -> np.ndarray:
    return np.clip(image, 0.0, 1.0)


def gaussian_kernel(size: int, sigma: float) -> Kernel:
    """Normalized 2-D Gaussian on an s x s grid.

    Even sizes are centered at the half-pixel offset (s - 1) / 2.
    """
    if size < 1:
        raise InvalidArgument(f"kernel size must be >= 1, got {size}")
    if not (sigma > 0):
        raise InvalidArgument(f"kernel sigma must be > 0, got {sigma}")
    coords = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    gauss = np.exp(-(coords**2) / (2.0 * sigma**2))
    weights = np.outer(gauss, gauss)
    weights /= weights.sum()
    return Kernel(weights=weights, size=int(size), sigma=float(sigma))


def blur(image: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Per-channel 2-D convolution with reflect padding; shape preserved."""
    image = validate_image(image)
    if kernel.size > min(image.shape[0], image.shape[1]):
        raise InvalidArgument(f"kernel size {kernel.size} exceeds image "
                              f"extent {image.shape[:2]}")
    out = np.empty_like(image)
    for ch in range(image.shape[2]):
        out[:, :, ch] = _impl.conv2d_reflect(image[:, :, ch], kernel.weights)
    return clamp01(out)


def rotate(image: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate counter-clockwise about the center; bilinear, zero-filled."""
    image = validate_image(image)
    if not np.isfinite(degrees):
        raise InvalidArgument("rotation angle must be finite")
    return clamp01(_impl.rotate_bilinear(image, float(degrees)))


def fourier_forward(array: np.ndarray) -> FourierField:
    """Centered 2-D DFT; channel-wise for 3-D inputs."""
    array = np.asarray(array, dtype=np.float64)
    if array.ndim == 2:
        coeff = np.fft.fftshift(np.fft.fft2(array))
    elif array.ndim == 3:
        coeff = np.fft.fftshift(np.fft.fft2(array, axes=(0, 1)), axes=(0, 1))
    else:
        raise InvalidArgument(f"expected 2-D or 3-D array, got {array.ndim}-D")
    return FourierField(coefficients=coeff)


def fourier_inverse(field: FourierField, imag_tol: float = 1e-6) -> np.ndarray:
    """Invert a centered DFT; errors if the imaginary residual is large."""
    coeff = field.coefficients
    if coeff.ndim == 2:
        out = np.fft.ifft2(np.fft.ifftshift(coeff))
    elif coeff.ndim == 3:
        out = np.fft.ifft2(np.fft.ifftshift(coeff, axes=(0, 1)), axes=(0, 1))
    else:
        raise InvalidArgument(f"expected 2-D or 3-D field, got {coeff.ndim}-D")
    residual = float(np.max(np.abs(out.imag))) if out.size else 0.0
    if residual >= imag_tol:
        raise NumericalInconsistency(
            f"imaginary residual {residual:.3g} >= {imag_tol:.3g}")
    return out.real


def percentile_threshold(heatmap: np.ndarray, percentile: float) -> Mask:
    """Select pixels at or above the linear-interpolation percentile value.

    Percentile 0 selects every pixel; ties are kept (rule >=).
    """
    heatmap = np.asarray(heatmap, dtype=np.float64)
    if heatmap.ndim != 2:
        raise InvalidArgument(f"heatmap must be 2-D, got shape {heatmap.shape}")
    if not (0 <= percentile < 100):
        raise InvalidArgument(f"percentile must be in [0, 100), got {percentile}")
    threshold = np.percentile(heatmap, percentile, method="linear")
    return Mask(bits=heatmap >= threshold)


def composite(original: np.ndarray, replacement: np.ndarray, mask: Mask) -> np.ndarray:
    """Replacement where the mask is true, original elsewhere."""
    original = np.asarray(original, dtype=np.float64)
    replacement = np.asarray(replacement, dtype=np.float64)
    if original.shape != replacement.shape:
        raise InvalidArgument(f"shape mismatch {original.shape} vs "
                              f"{replacement.shape}")
    bits = mask.bits
    if bits.shape != original.shape[:2]:
        raise InvalidArgument(f"mask shape {bits.shape} does not match image "
                              f"{original.shape[:2]}")
    return np.where(bits[..., None] if original.ndim == 3 else bits,
                    replacement, original)


def l2_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean norm of the elementwise difference."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgument(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm((a - b).ravel()))
