"""Circular Fourier-domain keys for latent-noise watermarking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arrayio import load_checkpoint, save_checkpoint
from ..errors import InvalidArgument


@dataclass(frozen=True)
class TreeRingKey:
    """Ring pattern plus boolean support mask in the centered Fourier plane
    of one latent channel."""

    pattern: np.ndarray  # (H, W) complex, zero outside mask
    mask: np.ndarray  # (H, W) bool, disk of `radius`
    radius: int
    channel: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.pattern.shape  # type: ignore[return-value]


def _center_distances(h: int, w: int) -> np.ndarray:
    cy, cx = h // 2, w // 2
    yy, xx = np.mgrid[0:h, 0:w]
    return np.sqrt((yy - cy) ** 2.0 + (xx - cx) ** 2.0)


def hermitian_mirror(field: np.ndarray) -> np.ndarray:
    """Index map i -> -i (mod N) in centered Fourier coordinates."""
    return np.roll(field[::-1, ::-1], shift=(1, 1), axis=(0, 1))


def hermitian_symmetrize(field: np.ndarray) -> np.ndarray:
    return 0.5 * (field + np.conj(hermitian_mirror(field)))


def make_key(latent_shape: tuple[int, ...], radius: int, channel: int,
             rng: np.random.Generator) -> TreeRingKey:
    """Concentric integer-radius rings up to `radius`, one value per ring,
    drawn from the Fourier transform of a Gaussian sample.

    The pattern is Hermitian-symmetrized so that embedding it keeps the
    latent real; ring values therefore end up real-valued.
    """
    if len(latent_shape) != 3:
        raise InvalidArgument(f"latent shape must be (C, H, W), got {latent_shape}")
    channels, h, w = latent_shape
    if not (1 <= radius <= min(h, w) // 2):
        raise InvalidArgument(f"radius {radius} outside [1, {min(h, w) // 2}] "
                              f"for latent {h}x{w}")
    if not (0 <= channel < channels):
        raise InvalidArgument(f"channel {channel} outside [0, {channels})")

    sample = rng.standard_normal((h, w))
    sample_fft = np.fft.fftshift(np.fft.fft2(sample))
    dist = _center_distances(h, w)
    cy, cx = h // 2, w // 2

    pattern = np.zeros((h, w), dtype=np.complex128)
    for ring in range(radius, 0, -1):  # overwrite inward
        pattern[dist <= ring] = sample_fft[cy, cx - ring]
    pattern = hermitian_symmetrize(pattern)

    mask = dist <= radius
    pattern[~mask] = 0.0
    return TreeRingKey(pattern=pattern, mask=mask, radius=int(radius),
                       channel=int(channel))


def embed_key(noise: np.ndarray, key: TreeRingKey) -> np.ndarray:
    """Replace the masked Fourier coefficients of the key channel.

    Hermitian symmetry is enforced on the modified plane so the output stays
    real; other channels are returned untouched.
    """
    noise = np.asarray(noise, dtype=np.float64)
    if noise.ndim != 3:
        raise InvalidArgument(f"latent must be (C, H, W), got shape {noise.shape}")
    if noise.shape[1:] != key.shape or key.channel >= noise.shape[0]:
        raise InvalidArgument(f"latent shape {noise.shape} incompatible with "
                              f"key {key.shape} on channel {key.channel}")
    plane_fft = np.fft.fftshift(np.fft.fft2(noise[key.channel]))
    plane_fft[key.mask] = key.pattern[key.mask]
    plane_fft = hermitian_symmetrize(plane_fft)
    plane = np.fft.ifft2(np.fft.ifftshift(plane_fft))
    out = noise.copy()
    out[key.channel] = plane.real
    return out


def save_key(path, key: TreeRingKey) -> None:
    save_checkpoint(path, "treering-key",
                    {"radius": key.radius, "channel": key.channel,
                     "height": key.shape[0], "width": key.shape[1]},
                    {"pattern": key.pattern, "mask": key.mask})


def load_key(path) -> TreeRingKey:
    kind, desc, arrays = load_checkpoint(path)
    if kind != "treering-key":
        raise InvalidArgument(f"not a tree-ring key file (kind={kind!r})")
    return TreeRingKey(pattern=arrays["pattern"].astype(np.complex128),
                       mask=arrays["mask"].astype(bool),
                       radius=int(desc["radius"]), channel=int(desc["channel"]))
